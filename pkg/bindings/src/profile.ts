import { readFileSync } from 'node:fs';

import { z } from 'zod';

import { FormatError } from './errors.js';

const fitLineSchema = z.object({
  a: z.number().finite(),
  b: z.number().finite(),
  sigma: z.number().finite().nonnegative(),
  n: z.number().int().positive(),
});

const isoParamsSchema = z.object({
  k_hat: z.number().finite().positive(),
  lambda_hat: z.number().min(-1).max(1),
  sigma_tl_hat: z.number().finite().positive(),
  sigma_r_hat: z.number().finite().nonnegative(),
});

const profileSchema = z
  .object({
    format_version: z.number().int().default(1),
    camera_id: z.string().min(1),
    per_iso: z.record(z.string().regex(/^\d+$/, 'ISO keys must be decimal integers'), isoParamsSchema),
    joint: z.object({
      log_k_min: z.number().finite(),
      log_k_max: z.number().finite(),
      tl_line: fitLineSchema,
      row_line: fitLineSchema,
      lambda_pool: z.array(z.number().min(-1).max(1)).nonempty(),
    }),
  })
  .refine((doc) => doc.joint.log_k_min <= doc.joint.log_k_max, {
    message: 'log_k_min must not exceed log_k_max',
    path: ['joint', 'log_k_min'],
  });

export type ProfileDocument = z.infer<typeof profileSchema>;

function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === 'object') {
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
    Object.freeze(value);
  }
  return value;
}

/**
 * Immutable handle around a validated camera profile.  Handles hold no
 * open resources and are safe to share across concurrent synthesis calls;
 * each call passes its own seed.
 */
export class BoundProfile {
  readonly document: ProfileDocument;

  private constructor(document: ProfileDocument) {
    this.document = document;
  }

  get cameraId(): string {
    return this.document.camera_id;
  }

  get lambdaPool(): readonly number[] {
    return this.document.joint.lambda_pool;
  }

  get isoSettings(): number[] {
    return Object.keys(this.document.per_iso)
      .map(Number)
      .sort((a, b) => a - b);
  }

  /** JSON text the rawnoise CLI accepts as a profile file. */
  serialize(): string {
    return JSON.stringify(this.document, null, 1) + '\n';
  }

  static fromDocument(value: unknown, source = '<memory>'): BoundProfile {
    const parsed = profileSchema.safeParse(value);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      const where = issue && issue.path.length ? ` at ${issue.path.join('.')}` : '';
      const what = issue ? issue.message : 'invalid profile';
      throw new FormatError(`${source}: ${what}${where}`);
    }
    return new BoundProfile(deepFreeze(parsed.data));
  }
}

export function loadProfile(profilePath: string): BoundProfile {
  let text: string;
  try {
    text = readFileSync(profilePath, 'utf8');
  } catch {
    throw new FormatError(`${profilePath}: file not found`);
  }
  let value: unknown;
  try {
    value = JSON.parse(text);
  } catch {
    throw new FormatError(`${profilePath}: invalid JSON`);
  }
  return BoundProfile.fromDocument(value, profilePath);
}
