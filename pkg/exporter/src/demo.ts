/**
 * Toy end-to-end run: train a 2-hidden-layer net on two blobs for two
 * epochs and export every hidden layer plus the input baseline.
 *
 *   node dist/src/demo.js [outDir]
 */

import { DEFAULT_SPEC, exportRun } from './exporter';
import { FeedForward, makeBlobs } from './network';

const outDir = process.argv[2] ?? 'export_out';
const samples = makeBlobs(60, 3.0, 7);
const model = new FeedForward([2, 8, 6, 2], 11);
const result = exportRun(model, samples, {
  ...DEFAULT_SPEC,
  layerPatterns: ['input', 'h*'],
  probeSize: 80,
  outDir,
});
console.log(`wrote ${result.files.length} files and ${result.manifestFile}`);
console.log('score it with: sepscope --format csv track --manifest ' + result.manifestFile);
