import { createApp, createService } from './app';
import { configFromEnv } from './config';

function main(): void {
  const port = process.env.SIDECAR_PORT ? Number(process.env.SIDECAR_PORT) : 8811;
  const host = process.env.SIDECAR_HOST ?? '127.0.0.1';

  let service;
  try {
    const config = configFromEnv();
    service = createService(config);
    console.log(
      `models: text=${config.textEmbeddingModelId} dual=${config.dualEncoderModelId}` +
        ` device=${config.device} target_width=${config.imageTargetWidthPx}px`,
    );
  } catch (err) {
    console.error(`startup failed: ${(err as Error).message}`);
    process.exit(1);
  }

  createApp(service).listen(port, host, () => {
    console.log(`scoring provider listening on http://${host}:${port}`);
  });
}

main();
