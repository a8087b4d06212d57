/**
 * Image loading and preprocessing.
 *
 * Accepted image payloads: a `data:image/png;base64,...` URI, a bare base64
 * string, or a local file path. Remote http(s) locators are rejected per
 * request (this service does not fetch). All images are resized to the
 * configured target width (aspect ratio preserved) before encoding.
 */

import * as fs from 'fs';
import { PNG } from 'pngjs';

export interface RgbaImage {
  width: number;
  height: number;
  /** RGBA, row-major, 4 bytes per pixel. */
  data: Uint8Array;
}

export function decodePng(buffer: Buffer): RgbaImage {
  const png = PNG.sync.read(buffer);
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

export function encodePng(image: RgbaImage): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  Buffer.from(image.data).copy(png.data);
  return PNG.sync.write(png);
}

export function loadImage(payload: string): RgbaImage {
  if (/^https?:\/\//i.test(payload)) {
    throw new Error(`remote locators are not fetched by this service: ${payload}`);
  }
  if (payload.startsWith('data:')) {
    const comma = payload.indexOf(',');
    if (comma < 0 || !/^data:image\/png;base64/i.test(payload)) {
      throw new Error('only data:image/png;base64 URIs are supported');
    }
    return decodePng(Buffer.from(payload.slice(comma + 1), 'base64'));
  }
  if (fs.existsSync(payload)) {
    return decodePng(fs.readFileSync(payload));
  }
  // Bare base64 is the remaining legal payload form.
  const buffer = Buffer.from(payload, 'base64');
  if (buffer.length === 0) {
    throw new Error('image payload is neither a readable path nor base64 data');
  }
  return decodePng(buffer);
}

/** Height that keeps the aspect ratio at the target width (within 1 px). */
export function scaledHeight(width: number, height: number, targetWidth: number): number {
  return Math.max(1, Math.round((height * targetWidth) / width));
}

export function resizeToWidth(image: RgbaImage, targetWidth: number): RgbaImage {
  if (targetWidth < 1 || !Number.isInteger(targetWidth)) {
    throw new Error(`target width must be a positive integer, got ${targetWidth}`);
  }
  if (image.width === targetWidth) {
    return image;
  }
  const targetHeight = scaledHeight(image.width, image.height, targetWidth);
  const out = new Uint8Array(targetWidth * targetHeight * 4);
  const xRatio = image.width / targetWidth;
  const yRatio = image.height / targetHeight;
  for (let y = 0; y < targetHeight; y++) {
    const srcY = Math.min((y + 0.5) * yRatio - 0.5, image.height - 1);
    const y0 = Math.max(0, Math.floor(srcY));
    const y1 = Math.min(image.height - 1, y0 + 1);
    const wy = srcY - y0;
    for (let x = 0; x < targetWidth; x++) {
      const srcX = Math.min((x + 0.5) * xRatio - 0.5, image.width - 1);
      const x0 = Math.max(0, Math.floor(srcX));
      const x1 = Math.min(image.width - 1, x0 + 1);
      const wx = srcX - x0;
      const outIdx = (y * targetWidth + x) * 4;
      for (let c = 0; c < 4; c++) {
        const p00 = image.data[(y0 * image.width + x0) * 4 + c];
        const p01 = image.data[(y0 * image.width + x1) * 4 + c];
        const p10 = image.data[(y1 * image.width + x0) * 4 + c];
        const p11 = image.data[(y1 * image.width + x1) * 4 + c];
        const top = p00 * (1 - wx) + p01 * wx;
        const bottom = p10 * (1 - wx) + p11 * wx;
        out[outIdx + c] = Math.round(top * (1 - wy) + bottom * wy);
      }
    }
  }
  return { width: targetWidth, height: targetHeight, data: out };
}
