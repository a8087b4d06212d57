/**
 * Service configuration. Model ids name entries in the encoder registries;
 * unknown ids fail at startup so a misconfigured service never half-works.
 */

export interface ModelConfig {
  textEmbeddingModelId: string;
  dualEncoderModelId: string;
  device: 'cpu' | 'gpu';
  imageTargetWidthPx: number;
}

export const DEFAULT_CONFIG: ModelConfig = {
  textEmbeddingModelId: 'builtin/hashed-bow-256',
  dualEncoderModelId: 'builtin/chroma-dual-encoder',
  device: 'cpu',
  imageTargetWidthPx: 540,
};

export function configFromEnv(env: NodeJS.ProcessEnv = process.env): ModelConfig {
  const width = env.SIDECAR_IMAGE_TARGET_WIDTH
    ? Number(env.SIDECAR_IMAGE_TARGET_WIDTH)
    : DEFAULT_CONFIG.imageTargetWidthPx;
  if (!Number.isInteger(width) || width < 1) {
    throw new Error(`image target width must be a positive integer, got ${env.SIDECAR_IMAGE_TARGET_WIDTH}`);
  }
  const device = env.SIDECAR_DEVICE ?? DEFAULT_CONFIG.device;
  if (device !== 'cpu' && device !== 'gpu') {
    throw new Error(`device must be cpu or gpu, got ${device}`);
  }
  return {
    textEmbeddingModelId: env.SIDECAR_TEXT_MODEL ?? DEFAULT_CONFIG.textEmbeddingModelId,
    dualEncoderModelId: env.SIDECAR_DUAL_ENCODER ?? DEFAULT_CONFIG.dualEncoderModelId,
    device,
    imageTargetWidthPx: width,
  };
}
