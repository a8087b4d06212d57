/**
 * Image-text dual encoders.
 *
 * The builtin encoder projects both sides into a small shared feature space
 * (chromaticity and brightness): images through pixel statistics of the
 * resized bitmap, captions through a color/brightness lexicon. Scores are
 * cosine similarities in that space, so a caption naming the image's
 * dominant color strictly outscores one naming a different color --
 * deterministic and fully offline. Other model ids can be registered
 * alongside it.
 */

import { RgbaImage } from './image';
import { tokenizeForEmbedding } from './textEncoder';

export interface DualEncoder {
  readonly modelId: string;
  /** Similarity in [-1, 1] of a preprocessed image against a caption. */
  score(image: RgbaImage, caption: string): number;
}

const FEATURE_DIM = 6; // red, green, blue, yellow, brightness, colorfulness

const LEXICON: Record<string, [number, number]> = {
  red: [0, 1],
  crimson: [0, 1],
  green: [1, 1],
  blue: [2, 1],
  navy: [2, 1],
  yellow: [3, 1],
  gold: [3, 1],
  bright: [4, 1],
  light: [4, 1],
  white: [4, 1],
  dark: [4, -1],
  black: [4, -1],
  colorful: [5, 1],
  vivid: [5, 1],
  gray: [5, -1],
  grey: [5, -1],
};

export function imageFeatures(image: RgbaImage): number[] {
  const pixels = image.width * image.height;
  let r = 0;
  let g = 0;
  let b = 0;
  for (let i = 0; i < pixels; i++) {
    r += image.data[i * 4];
    g += image.data[i * 4 + 1];
    b += image.data[i * 4 + 2];
  }
  r /= pixels * 255;
  g /= pixels * 255;
  b /= pixels * 255;
  const luma = 0.299 * r + 0.587 * g + 0.114 * b;
  return [
    r - (g + b) / 2,
    g - (r + b) / 2,
    b - (r + g) / 2,
    (r + g) / 2 - b,
    luma - 0.5,
    Math.max(r, g, b) - Math.min(r, g, b),
  ];
}

export function captionFeatures(caption: string): number[] {
  const features = new Array<number>(FEATURE_DIM).fill(0);
  for (const token of tokenizeForEmbedding(caption)) {
    const entry = LEXICON[token];
    if (entry) {
      features[entry[0]] += entry[1];
    }
  }
  return features;
}

function cosine(a: number[], b: number[]): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na === 0 || nb === 0) {
    return 0;
  }
  return dot / Math.sqrt(na * nb);
}

class ChromaDualEncoder implements DualEncoder {
  readonly modelId = 'builtin/chroma-dual-encoder';

  score(image: RgbaImage, caption: string): number {
    const similarity = cosine(imageFeatures(image), captionFeatures(caption));
    return Math.max(-1, Math.min(1, similarity));
  }
}

const REGISTRY: Record<string, () => DualEncoder> = {
  'builtin/chroma-dual-encoder': () => new ChromaDualEncoder(),
};

export function resolveDualEncoder(modelId: string): DualEncoder {
  const factory = REGISTRY[modelId];
  if (!factory) {
    const known = Object.keys(REGISTRY).join(', ');
    throw new Error(`unknown dual encoder model '${modelId}' (available: ${known})`);
  }
  return factory();
}
