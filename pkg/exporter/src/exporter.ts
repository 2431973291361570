/**
 * Capture per-epoch hidden-layer outputs for a fixed probe subset and write
 * them in the LSMX/LSMY + manifest format the sepscope tracker consumes.
 */

import * as fs from 'fs';
import * as path from 'path';

import {
  Dtype,
  EpochEntry,
  Manifest,
  saveManifest,
  writeLabels,
  writeMatrix,
} from './formats';
import { FeedForward, Rng, Sample } from './network';

export interface ExportSpec {
  /** layer name patterns to capture ("h1", "h*", "input", ...) */
  layerPatterns: string[];
  probeSize: number;
  outDir: string;
  epochs: number;
  dtype: Dtype;
  learningRate: number;
  seed: number;
  runId: string;
}

export const DEFAULT_SPEC: Omit<ExportSpec, 'outDir'> = {
  layerPatterns: ['h*'],
  probeSize: 500,
  epochs: 2,
  dtype: 'f4',
  learningRate: 0.5,
  seed: 1,
  runId: 'toy-export',
};

function patternToRegex(pattern: string): RegExp {
  const escaped = pattern.replace(/[.+?^${}()|[\]\\]/g, '\\$&').replace(/\*/g, '.*');
  return new RegExp(`^${escaped}$`);
}

/** Resolve capture patterns against the model's capturable layer names. */
export function resolveLayers(model: FeedForward, patterns: string[]): string[] {
  const available = ['input', ...model.hiddenNames];
  const matched: string[] = [];
  for (const name of available) {
    if (patterns.some((p) => patternToRegex(p).test(name))) {
      matched.push(name);
    }
  }
  if (matched.length === 0) {
    throw new Error(
      `no layer matches patterns [${patterns.join(', ')}]; ` +
      `available: [${available.join(', ')}]`,
    );
  }
  return matched;
}

/** Fixed probe row picks, chosen once and reused for every epoch. */
export function pickProbe(total: number, probeSize: number, seed: number): number[] {
  if (probeSize >= total) {
    return Array.from({ length: total }, (_, k) => k);
  }
  const rng = new Rng(seed ^ 0x9e3779b9);
  const picked = new Set<number>();
  while (picked.size < probeSize) {
    picked.add(Math.floor(rng.next() * total));
  }
  return Array.from(picked).sort((a, b) => a - b);
}

export interface ExportResult {
  manifestFile: string;
  files: string[];
}

/**
 * Train for spec.epochs epochs; after each one, push the probe subset
 * through the model and dump every captured layer.  Row order follows the
 * probe index list, so all files within one epoch stay aligned.
 */
export function exportRun(
  model: FeedForward,
  samples: Sample[],
  spec: ExportSpec,
): ExportResult {
  const layers = resolveLayers(model, spec.layerPatterns); // fails before training
  fs.mkdirSync(spec.outDir, { recursive: true });
  const probe = pickProbe(samples.length, spec.probeSize, spec.seed);
  const labels = probe.map((k) => samples[k].label);
  const trainRng = new Rng(spec.seed + 17);
  const files: string[] = [];
  const manifest: Manifest = { run_id: spec.runId, epochs: [] };

  for (let epoch = 0; epoch < spec.epochs; epoch++) {
    model.trainEpoch(samples, spec.learningRate, trainRng);

    const captured = new Map<string, number[][]>();
    for (const name of layers) {
      captured.set(name, []);
    }
    for (const k of probe) {
      const byLayer = model.activations(samples[k].input);
      for (const name of layers) {
        captured.get(name)!.push(byLayer.get(name)!);
      }
    }

    const tag = String(epoch).padStart(3, '0');
    const labelsName = `epoch${tag}_labels.lsmy`;
    writeLabels(labels, path.join(spec.outDir, labelsName));
    files.push(labelsName);

    const entry: EpochEntry = {
      epoch,
      layers: {},
      train_acc: model.accuracy(samples),
      test_acc: null,
    };
    for (const name of layers) {
      const rows = captured.get(name)!;
      const cols = rows[0].length;
      const flat = new Float64Array(rows.length * cols);
      rows.forEach((row, r) => row.forEach((v, c) => { flat[r * cols + c] = v; }));
      const dataName = `epoch${tag}_${name}.lsmx`;
      writeMatrix(rows.length, cols, flat, path.join(spec.outDir, dataName), spec.dtype);
      files.push(dataName);
      entry.layers[name] = { data: dataName, labels: labelsName };
    }
    manifest.epochs.push(entry);
  }

  const manifestFile = saveManifest(manifest, spec.outDir);
  return { manifestFile, files };
}
