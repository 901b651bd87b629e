import { spawnSync } from 'node:child_process';
import { accessSync, constants, mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import * as path from 'node:path';

import { CliError } from './errors.js';

function findOnPath(name: string): string | null {
  const dirs = (process.env.PATH ?? '').split(path.delimiter);
  for (const dir of dirs) {
    if (!dir) continue;
    const candidate = path.join(dir, name);
    try {
      accessSync(candidate, constants.X_OK);
      return candidate;
    } catch {
      // keep looking
    }
  }
  return null;
}

/**
 * Command prefix for the rawnoise CLI.  Override with RAWNOISE_CLI
 * (whitespace-separated); otherwise `rawnoise` on PATH, falling back to
 * running its module with python3.
 */
export function cliCommand(): string[] {
  const override = process.env.RAWNOISE_CLI;
  if (override) return override.split(/\s+/).filter(Boolean);
  const found = findOnPath('rawnoise');
  return found ? [found] : ['python3', '-m', 'rawnoise.cli'];
}

export function runCli(args: readonly string[]): string {
  const [cmd, ...prefix] = cliCommand();
  const proc = spawnSync(cmd!, [...prefix, ...args], {
    encoding: 'utf8',
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new CliError(`failed to run ${cmd}: ${proc.error.message}`, null);
  }
  if (proc.status !== 0) {
    const lines = (proc.stderr ?? '').trim().split('\n');
    const detail = lines[lines.length - 1] || `rawnoise exited with status ${proc.status}`;
    throw new CliError(detail, proc.status);
  }
  return proc.stdout ?? '';
}

export function withTempDir<T>(prefix: string, fn: (dir: string) => T): T {
  const dir = mkdtempSync(path.join(tmpdir(), prefix));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
