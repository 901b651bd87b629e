import type { Frame, FrameMeta } from '../src/index';

/** Profile whose joint model always samples exactly (k, lam, sigmaTl, sigmaR). */
export function degenerateProfileDoc(
  k = 2,
  lam = 0.1,
  sigmaTl = 2,
  sigmaR = 1,
  cameraId = 'fixture',
): Record<string, unknown> {
  return {
    format_version: 1,
    camera_id: cameraId,
    per_iso: {
      '800': { k_hat: k, lambda_hat: lam, sigma_tl_hat: sigmaTl, sigma_r_hat: sigmaR },
    },
    joint: {
      log_k_min: Math.log2(k),
      log_k_max: Math.log2(k),
      tl_line: { a: 0, b: Math.log2(sigmaTl), sigma: 0, n: 3 },
      row_line: { a: 0, b: Math.log2(sigmaR), sigma: 0, n: 3 },
      lambda_pool: [lam],
    },
  };
}

/** Deterministic integer-valued test scene with a nonzero black level. */
export function patternFrame(width = 128, height = 96): Frame {
  const meta: FrameMeta = {
    cameraId: 'ts-fixture',
    iso: 1600,
    bayerPattern: 'RGGB',
    blackLevel: 512,
    whiteLevel: 16383,
  };
  const data = new Float64Array(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      data[y * width + x] = ((x * 7 + y * 13) % 1000) + 500;
    }
  }
  return { data, width, height, meta };
}

export function framesEqual(a: Float64Array, b: Float64Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (!Object.is(a[i], b[i])) return false;
  }
  return true;
}
