import { mkdirSync, writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { runCli, withTempDir } from './cli.js';
import { FormatError } from './errors.js';
import { readFrameFiles, writeFrameFiles } from './frames.js';
import type { Frame } from './frames.js';
import type { BoundProfile } from './profile.js';

export type NoiseComponent = 'shot' | 'read' | 'row' | 'quant';

export interface NoiseParamsRecord {
  k: number;
  lam: number;
  sigmaTl: number;
  sigmaR: number;
  q: number;
  enabled: NoiseComponent[];
}

export interface SynthPairOptions {
  seed?: number;
  fMin?: number;
  fMax?: number;
  disable?: readonly NoiseComponent[];
}

export interface SynthPairResult {
  noisy: Frame;
  clean: Frame;
  params: NoiseParamsRecord;
  f: number;
  seed: number;
}

/**
 * Synthesize one noisy/clean pair from an in-memory clean frame.  The
 * numeric contract is the CLI's: same profile, frame, and seed give
 * bit-identical output to `rawnoise synth --count 1`.
 */
export function synthPair(
  profile: BoundProfile,
  clean: Frame,
  options: SynthPairOptions = {},
): SynthPairResult {
  const seed = options.seed ?? 0;
  if (!Number.isInteger(seed)) {
    throw new RangeError(`seed must be an integer, got ${seed}`);
  }
  return withTempDir('rawnoise-synth-', (dir) => {
    const cleanDir = path.join(dir, 'clean');
    const outDir = path.join(dir, 'out');
    mkdirSync(cleanDir);
    writeFrameFiles(clean, path.join(cleanDir, 'clean.pgm'), 'clean');
    const profilePath = path.join(dir, 'profile.json');
    writeFileSync(profilePath, profile.serialize());

    const args = [
      'synth',
      '--clean', cleanDir,
      '--profile', profilePath,
      '--out', outDir,
      '--count', '1',
      '--seed', String(seed),
    ];
    if (options.fMin !== undefined) args.push('--f-min', String(options.fMin));
    if (options.fMax !== undefined) args.push('--f-max', String(options.fMax));
    if (options.disable !== undefined && options.disable.length > 0) {
      args.push('--disable', options.disable.join(','));
    }
    runCli(args);

    const noisy = readFrameFiles(path.join(outDir, 'noisy_00000.pgm'));
    const cleanOut = readFrameFiles(path.join(outDir, 'clean_00000.pgm'));
    return {
      noisy: noisy.frame,
      clean: cleanOut.frame,
      params: paramsFromSidecar(noisy.sidecar),
      f: numberField(noisy.sidecar, 'low_light_factor'),
      seed,
    };
  });
}

function numberField(doc: Record<string, unknown>, field: string): number {
  const value = doc[field];
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    throw new FormatError(`noisy sidecar field '${field}' missing or non-numeric`);
  }
  return value;
}

function paramsFromSidecar(doc: Record<string, unknown>): NoiseParamsRecord {
  const raw = doc['noise_params'];
  if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
    throw new FormatError("noisy sidecar field 'noise_params' missing or malformed");
  }
  const record = raw as Record<string, unknown>;
  const enabled = record['enabled'];
  if (!Array.isArray(enabled) || enabled.some((c) => typeof c !== 'string')) {
    throw new FormatError("noise_params field 'enabled' must be a list of component names");
  }
  return {
    k: numberField(record, 'k'),
    lam: numberField(record, 'lam'),
    sigmaTl: numberField(record, 'sigma_tl'),
    sigmaR: numberField(record, 'sigma_r'),
    q: numberField(record, 'q'),
    enabled: enabled as NoiseComponent[],
  };
}
