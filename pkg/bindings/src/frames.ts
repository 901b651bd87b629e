import { readFileSync, writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { FormatError } from './errors.js';

export type BayerPattern = 'RGGB' | 'BGGR' | 'GRBG' | 'GBRG';

const BAYER_PATTERNS: readonly BayerPattern[] = ['RGGB', 'BGGR', 'GRBG', 'GBRG'];

export type FrameKind = 'clean' | 'noisy' | 'bias' | 'flat';

export interface FrameMeta {
  cameraId: string;
  iso: number;
  bayerPattern: BayerPattern;
  blackLevel: number;
  whiteLevel: number;
  exposureTimeS?: number;
}

/** Row-major frame in DN with the black level already subtracted. */
export interface Frame {
  data: Float64Array;
  width: number;
  height: number;
  meta: FrameMeta;
}

// Bankers' rounding to match the writer on the other side of the CLI.
function rintHalfEven(x: number): number {
  const f = Math.floor(x);
  const d = x - f;
  if (d < 0.5) return f;
  if (d > 0.5) return f + 1;
  return f % 2 === 0 ? f : f + 1;
}

function checkFrame(frame: Frame, label: string): void {
  const { data, width, height, meta } = frame;
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new FormatError(`${label}: dimensions must be positive integers`);
  }
  if (data.length !== width * height) {
    throw new FormatError(`${label}: data length ${data.length} != ${width}x${height}`);
  }
  if (!BAYER_PATTERNS.includes(meta.bayerPattern)) {
    throw new FormatError(`${label}: invalid bayer pattern ${String(meta.bayerPattern)}`);
  }
  if (!Number.isInteger(meta.blackLevel) || meta.blackLevel < 0) {
    throw new FormatError(`${label}: black level must be a nonnegative integer`);
  }
  if (!Number.isInteger(meta.whiteLevel) || meta.whiteLevel <= meta.blackLevel) {
    throw new FormatError(`${label}: white level must be an integer above the black level`);
  }
  if (meta.whiteLevel > 65535) {
    throw new FormatError(`${label}: white_level ${meta.whiteLevel} exceeds 16-bit raster range`);
  }
  if (!Number.isInteger(meta.iso) || meta.iso < 1) {
    throw new FormatError(`${label}: iso must be a positive integer`);
  }
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i]!)) {
      throw new FormatError(`${label}: non-finite sample at index ${i}`);
    }
  }
}

export function encodeRaster(frame: Frame): Buffer {
  const { data, width, height, meta } = frame;
  const saturation = meta.whiteLevel - meta.blackLevel;
  const header = Buffer.from(`P5\n${width} ${height}\n65535\n`, 'ascii');
  const body = Buffer.alloc(data.length * 2);
  for (let i = 0; i < data.length; i++) {
    const clipped = Math.min(Math.max(data[i]!, 0), saturation);
    body.writeUInt16BE(rintHalfEven(clipped) + meta.blackLevel, i * 2);
  }
  return Buffer.concat([header, body]);
}

export function sidecarDocument(frame: Frame, kind: FrameKind): Record<string, unknown> {
  const doc: Record<string, unknown> = {
    format_version: 1,
    camera_id: frame.meta.cameraId,
    iso: frame.meta.iso,
    bayer_pattern: frame.meta.bayerPattern,
    black_level: frame.meta.blackLevel,
    white_level: frame.meta.whiteLevel,
    width: frame.width,
    height: frame.height,
    kind,
  };
  if (frame.meta.exposureTimeS !== undefined) {
    doc['exposure_time_s'] = frame.meta.exposureTimeS;
  }
  return doc;
}

export function sidecarPath(rasterPath: string): string {
  const parsed = path.parse(rasterPath);
  return path.join(parsed.dir, `${parsed.name}.json`);
}

export function writeFrameFiles(frame: Frame, rasterPath: string, kind: FrameKind = 'clean'): void {
  checkFrame(frame, rasterPath);
  writeFileSync(rasterPath, encodeRaster(frame));
  writeFileSync(sidecarPath(rasterPath), JSON.stringify(sidecarDocument(frame, kind), null, 1) + '\n');
}

interface RasterPayload {
  stored: Uint16Array;
  width: number;
  height: number;
}

export function parseRaster(blob: Buffer, label: string): RasterPayload {
  // header: magic, width, height, maxval as whitespace-separated tokens,
  // with '#' comments allowed between them
  const tokens: string[] = [];
  let i = 0;
  while (tokens.length < 4 && i < blob.length) {
    const c = blob[i]!;
    if (c === 0x23) {
      const nl = blob.indexOf(0x0a, i);
      if (nl < 0) break;
      i = nl + 1;
    } else if (isSpaceByte(c)) {
      i += 1;
    } else {
      let j = i;
      while (j < blob.length && !isSpaceByte(blob[j]!) && blob[j] !== 0x23) j += 1;
      tokens.push(blob.toString('ascii', i, j));
      i = j;
    }
  }
  if (tokens.length < 4 || tokens[0] !== 'P5') {
    throw new FormatError(`${label}: not a binary 16-bit grayscale raster`);
  }
  const width = Number(tokens[1]);
  const height = Number(tokens[2]);
  const maxval = Number(tokens[3]);
  if (!Number.isInteger(width) || !Number.isInteger(height) || !Number.isInteger(maxval)) {
    throw new FormatError(`${label}: malformed raster header`);
  }
  if (maxval !== 65535) {
    throw new FormatError(`${label}: raster maxval must be 65535, got ${maxval}`);
  }
  if (i >= blob.length || !isSpaceByte(blob[i]!)) {
    throw new FormatError(`${label}: malformed raster header`);
  }
  const start = i + 1;
  const expected = width * height * 2;
  if (blob.length - start < expected) {
    throw new FormatError(`${label}: truncated raster (${blob.length - start} of ${expected} data bytes)`);
  }
  const stored = new Uint16Array(width * height);
  for (let s = 0; s < stored.length; s++) {
    stored[s] = blob.readUInt16BE(start + s * 2);
  }
  return { stored, width, height };
}

function isSpaceByte(c: number): boolean {
  return c === 0x20 || c === 0x09 || c === 0x0a || c === 0x0d || c === 0x0b || c === 0x0c;
}

export interface FrameWithSidecar {
  frame: Frame;
  sidecar: Record<string, unknown>;
}

export function readFrameFiles(rasterPath: string): FrameWithSidecar {
  let blob: Buffer;
  try {
    blob = readFileSync(rasterPath);
  } catch {
    throw new FormatError(`${rasterPath}: file not found`);
  }
  const { stored, width, height } = parseRaster(blob, rasterPath);

  const scPath = sidecarPath(rasterPath);
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(scPath, 'utf8'));
  } catch (err) {
    if (err instanceof SyntaxError) throw new FormatError(`${scPath}: invalid JSON`);
    throw new FormatError(`${scPath}: file not found`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new FormatError(`${scPath}: expected a JSON object`);
  }
  const sidecar = doc as Record<string, unknown>;

  const docWidth = requireInt(sidecar, 'width', scPath);
  const docHeight = requireInt(sidecar, 'height', scPath);
  if (docWidth !== width || docHeight !== height) {
    throw new FormatError(
      `${scPath}: dimensions ${docWidth}x${docHeight} do not match raster ${width}x${height}`,
    );
  }
  const whiteLevel = requireInt(sidecar, 'white_level', scPath);
  let maxStored = 0;
  for (let s = 0; s < stored.length; s++) {
    if (stored[s]! > maxStored) maxStored = stored[s]!;
  }
  if (maxStored > whiteLevel) {
    throw new FormatError(`${rasterPath}: sample value ${maxStored} exceeds white_level ${whiteLevel}`);
  }
  const pattern = sidecar['bayer_pattern'];
  if (typeof pattern !== 'string' || !BAYER_PATTERNS.includes(pattern as BayerPattern)) {
    throw new FormatError(`${scPath}: invalid field 'bayer_pattern'`);
  }
  const blackLevel = requireInt(sidecar, 'black_level', scPath);

  const data = new Float64Array(stored.length);
  for (let s = 0; s < stored.length; s++) {
    data[s] = Math.max(stored[s]! - blackLevel, 0);
  }
  const exposure = sidecar['exposure_time_s'];
  const meta: FrameMeta = {
    cameraId: String(requireField(sidecar, 'camera_id', scPath)),
    iso: requireInt(sidecar, 'iso', scPath),
    bayerPattern: pattern as BayerPattern,
    blackLevel,
    whiteLevel,
  };
  if (typeof exposure === 'number') meta.exposureTimeS = exposure;
  return { frame: { data, width, height, meta }, sidecar };
}

function requireField(doc: Record<string, unknown>, field: string, label: string): unknown {
  if (!(field in doc)) {
    throw new FormatError(`${label}: missing sidecar field '${field}'`);
  }
  return doc[field];
}

function requireInt(doc: Record<string, unknown>, field: string, label: string): number {
  const value = requireField(doc, field, label);
  if (typeof value !== 'number' || !Number.isInteger(value)) {
    throw new FormatError(`${label}: field '${field}' must be an integer`);
  }
  return value;
}
