import { writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { runCli, withTempDir } from './cli.js';
import { FormatError } from './errors.js';
import type { BoundProfile } from './profile.js';

export interface NoiseDraw {
  index: number;
  k: number;
  lam: number;
  sigmaTl: number;
  sigmaR: number;
  q: number;
}

export interface SampleParamsOptions {
  count: number;
  seed?: number;
}

const CSV_HEADER = 'index,k,lam,sigma_tl,sigma_r,q';

/** Draw per-image noise parameters from the profile's joint model. */
export function sampleParams(profile: BoundProfile, options: SampleParamsOptions): NoiseDraw[] {
  const { count, seed = 0 } = options;
  if (!Number.isInteger(count) || count < 1) {
    throw new RangeError(`count must be a positive integer, got ${count}`);
  }
  if (!Number.isInteger(seed)) {
    throw new RangeError(`seed must be an integer, got ${seed}`);
  }
  const stdout = withTempDir('rawnoise-params-', (dir) => {
    const profilePath = path.join(dir, 'profile.json');
    writeFileSync(profilePath, profile.serialize());
    return runCli([
      'sample-params',
      '--profile', profilePath,
      '--count', String(count),
      '--seed', String(seed),
    ]);
  });
  return parseDraws(stdout, count);
}

function parseDraws(csv: string, count: number): NoiseDraw[] {
  const lines = csv.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines[0] !== CSV_HEADER) {
    throw new FormatError(`unexpected sample-params header: ${lines[0] ?? '<empty>'}`);
  }
  if (lines.length !== count + 1) {
    throw new FormatError(`expected ${count} draws, got ${lines.length - 1}`);
  }
  return lines.slice(1).map((line, row) => {
    const fields = line.split(',');
    if (fields.length !== 6) {
      throw new FormatError(`row ${row}: expected 6 fields, got ${fields.length}`);
    }
    const values = fields.map(Number);
    if (values.some((v) => !Number.isFinite(v))) {
      throw new FormatError(`row ${row}: non-numeric field in ${line}`);
    }
    return {
      index: values[0]!,
      k: values[1]!,
      lam: values[2]!,
      sigmaTl: values[3]!,
      sigmaR: values[4]!,
      q: values[5]!,
    };
  });
}
