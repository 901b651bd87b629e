export { CliError, FormatError } from './errors.js';
export { cliCommand, runCli, withTempDir } from './cli.js';
export {
  encodeRaster,
  parseRaster,
  readFrameFiles,
  sidecarDocument,
  sidecarPath,
  writeFrameFiles,
} from './frames.js';
export type { BayerPattern, Frame, FrameKind, FrameMeta, FrameWithSidecar } from './frames.js';
export { BoundProfile, loadProfile } from './profile.js';
export type { ProfileDocument } from './profile.js';
export { sampleParams } from './params.js';
export type { NoiseDraw, SampleParamsOptions } from './params.js';
export { synthPair } from './synth.js';
export type {
  NoiseComponent,
  NoiseParamsRecord,
  SynthPairOptions,
  SynthPairResult,
} from './synth.js';
