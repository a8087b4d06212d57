/**
 * HTTP surface: the scoring-provider wire protocol.
 *
 *   POST /capabilities      {} -> {embedding_dim, max_text_len, supports_image_text}
 *   POST /embed_texts       {texts: string[]} -> {vectors: number[][], dim}
 *   POST /score_image_text  {pairs: [{image, text}]} -> {scores: number[]}
 *   GET  /health            -> {status: "ok"}
 *
 * Responses are order-aligned with requests. Per-request failures return a
 * JSON error body without crashing the process. Texts longer than the
 * model's limit are truncated server-side and flagged with an X-Truncated
 * response header.
 */

import express, { Express, Request, Response } from 'express';
import { z } from 'zod';

import { ModelConfig } from './config';
import { DualEncoder, resolveDualEncoder } from './dualEncoder';
import { loadImage, resizeToWidth } from './image';
import { TextEncoder, resolveTextEncoder } from './textEncoder';

const embedRequest = z.object({ texts: z.array(z.string()) });
const scoreRequest = z.object({
  pairs: z.array(z.object({ image: z.string(), text: z.string() })),
});

export interface Service {
  config: ModelConfig;
  textEncoder: TextEncoder;
  dualEncoder: DualEncoder;
}

export function createService(config: ModelConfig): Service {
  return {
    config,
    textEncoder: resolveTextEncoder(config.textEmbeddingModelId),
    dualEncoder: resolveDualEncoder(config.dualEncoderModelId),
  };
}

function badRequest(res: Response, message: string): void {
  res.status(400).json({ error: message });
}

export function createApp(service: Service): Express {
  const app = express();
  app.use(express.json({ limit: '64mb' }));

  app.get('/health', (_req: Request, res: Response) => {
    res.json({ status: 'ok' });
  });

  app.post('/capabilities', (_req: Request, res: Response) => {
    res.json({
      embedding_dim: service.textEncoder.dim,
      max_text_len: service.textEncoder.maxTextLen,
      supports_image_text: true,
    });
  });

  app.post('/embed_texts', (req: Request, res: Response) => {
    const parsed = embedRequest.safeParse(req.body);
    if (!parsed.success) {
      return badRequest(res, `malformed embed_texts request: ${parsed.error.message}`);
    }
    const limit = service.textEncoder.maxTextLen;
    let truncated = false;
    const texts = parsed.data.texts.map((text) => {
      if (text.length > limit) {
        truncated = true;
        return text.slice(0, limit);
      }
      return text;
    });
    const vectors = service.textEncoder.embed(texts);
    if (truncated) {
      res.set('X-Truncated', 'true');
    }
    res.json({ vectors, dim: service.textEncoder.dim });
  });

  app.post('/score_image_text', (req: Request, res: Response) => {
    const parsed = scoreRequest.safeParse(req.body);
    if (!parsed.success) {
      return badRequest(res, `malformed score_image_text request: ${parsed.error.message}`);
    }
    const scores: number[] = [];
    for (const [position, pair] of parsed.data.pairs.entries()) {
      try {
        const image = resizeToWidth(loadImage(pair.image), service.config.imageTargetWidthPx);
        scores.push(service.dualEncoder.score(image, pair.text));
      } catch (err) {
        return badRequest(res, `pair ${position}: ${(err as Error).message}`);
      }
    }
    res.json({ scores });
  });

  return app;
}
