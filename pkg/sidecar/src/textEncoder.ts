/**
 * Text embedding models.
 *
 * The builtin encoder is a hashed bag-of-words projection: deterministic,
 * dependency-free, and good enough for context-similarity scoring in
 * offline setups. Additional model ids (e.g. ONNX exports of sentence
 * encoders) can be registered without touching the service surface.
 */

export interface TextEncoder {
  readonly modelId: string;
  readonly dim: number;
  readonly maxTextLen: number;
  embed(texts: string[]): number[][];
}

const CJK_RANGES: Array<[number, number]> = [
  [0x3400, 0x4dbf],
  [0x4e00, 0x9fff],
  [0xf900, 0xfaff],
  [0x3040, 0x30ff],
  [0xac00, 0xd7af],
];

function isCjk(cp: number): boolean {
  return CJK_RANGES.some(([lo, hi]) => cp >= lo && cp <= hi);
}

export function tokenizeForEmbedding(text: string): string[] {
  const tokens: string[] = [];
  let run = '';
  for (const ch of text.toLowerCase()) {
    const cp = ch.codePointAt(0)!;
    if (isCjk(cp)) {
      if (run) {
        tokens.push(run);
        run = '';
      }
      tokens.push(ch);
    } else if (/[\p{L}\p{N}]/u.test(ch)) {
      run += ch;
    } else if (run) {
      tokens.push(run);
      run = '';
    }
  }
  if (run) tokens.push(run);
  return tokens;
}

/** FNV-1a, 32-bit; stable across runs and platforms. */
export function fnv1a(text: string, seed = 0x811c9dc5): number {
  let hash = seed >>> 0;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

export function l2Normalize(vector: number[]): number[] {
  const norm = Math.sqrt(vector.reduce((acc, v) => acc + v * v, 0));
  if (norm === 0) {
    // Degenerate input (no tokens): a fixed unit vector keeps the protocol's
    // "never all-zero" promise while staying deterministic.
    const unit = vector.slice();
    unit[0] = 1;
    return unit;
  }
  return vector.map((v) => v / norm);
}

class HashedBagOfWords implements TextEncoder {
  readonly modelId: string;
  readonly dim: number;
  readonly maxTextLen = 8192;

  constructor(modelId: string, dim: number) {
    this.modelId = modelId;
    this.dim = dim;
  }

  embed(texts: string[]): number[][] {
    return texts.map((text) => {
      const accumulator = new Array<number>(this.dim).fill(0);
      for (const token of tokenizeForEmbedding(text)) {
        const bucket = fnv1a(token) % this.dim;
        const sign = fnv1a(token, 0x9747b28c) % 2 === 0 ? 1 : -1;
        accumulator[bucket] += sign;
      }
      return l2Normalize(accumulator);
    });
  }
}

const REGISTRY: Record<string, () => TextEncoder> = {
  'builtin/hashed-bow-256': () => new HashedBagOfWords('builtin/hashed-bow-256', 256),
  'builtin/hashed-bow-64': () => new HashedBagOfWords('builtin/hashed-bow-64', 64),
};

export function resolveTextEncoder(modelId: string): TextEncoder {
  const factory = REGISTRY[modelId];
  if (!factory) {
    const known = Object.keys(REGISTRY).join(', ');
    throw new Error(`unknown text embedding model '${modelId}' (available: ${known})`);
  }
  return factory();
}
