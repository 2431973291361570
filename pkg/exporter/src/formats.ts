/**
 * Binary matrix (LSMX) and label (LSMY) files plus the run manifest.
 *
 * LSMX: magic "LSMX", u32 LE version (=1), u8 dtype code (1 = float32,
 * 2 = float64), 3 padding bytes, u64 rows, u64 cols, row-major payload.
 * LSMY: magic "LSMY", u32 LE version (=1), u64 count, int64 payload.
 */

import * as fs from 'fs';
import * as path from 'path';

const LSMX_MAGIC = 'LSMX';
const LSMY_MAGIC = 'LSMY';
const VERSION = 1;

export type Dtype = 'f4' | 'f8';

export function writeMatrix(
  rows: number,
  cols: number,
  values: Float64Array | number[],
  file: string,
  dtype: Dtype = 'f4',
): void {
  const data = values instanceof Float64Array ? values : Float64Array.from(values);
  if (data.length !== rows * cols) {
    throw new Error(`payload has ${data.length} values, expected ${rows * cols}`);
  }
  const itemSize = dtype === 'f4' ? 4 : 8;
  const buffer = Buffer.alloc(28 + rows * cols * itemSize);
  buffer.write(LSMX_MAGIC, 0, 'ascii');
  buffer.writeUInt32LE(VERSION, 4);
  buffer.writeUInt8(dtype === 'f4' ? 1 : 2, 8);
  buffer.writeBigUInt64LE(BigInt(rows), 12);
  buffer.writeBigUInt64LE(BigInt(cols), 20);
  for (let k = 0; k < data.length; k++) {
    if (dtype === 'f4') {
      buffer.writeFloatLE(Math.fround(data[k]), 28 + 4 * k);
    } else {
      buffer.writeDoubleLE(data[k], 28 + 8 * k);
    }
  }
  fs.writeFileSync(file, buffer);
}

export function readMatrix(file: string): { rows: number; cols: number; values: Float64Array } {
  const buffer = fs.readFileSync(file);
  if (buffer.length < 28 || buffer.toString('ascii', 0, 4) !== LSMX_MAGIC) {
    throw new Error(`${file}: bad magic or truncated header`);
  }
  if (buffer.readUInt32LE(4) !== VERSION) {
    throw new Error(`${file}: unsupported version`);
  }
  const code = buffer.readUInt8(8);
  const itemSize = code === 1 ? 4 : 8;
  const rows = Number(buffer.readBigUInt64LE(12));
  const cols = Number(buffer.readBigUInt64LE(20));
  if (buffer.length - 28 !== rows * cols * itemSize) {
    throw new Error(`${file}: payload does not match header dimensions`);
  }
  const values = new Float64Array(rows * cols);
  for (let k = 0; k < values.length; k++) {
    values[k] = code === 1
      ? buffer.readFloatLE(28 + 4 * k)
      : buffer.readDoubleLE(28 + 8 * k);
  }
  return { rows, cols, values };
}

export function writeLabels(labels: number[] | Int32Array, file: string): void {
  const buffer = Buffer.alloc(16 + labels.length * 8);
  buffer.write(LSMY_MAGIC, 0, 'ascii');
  buffer.writeUInt32LE(VERSION, 4);
  buffer.writeBigUInt64LE(BigInt(labels.length), 8);
  for (let k = 0; k < labels.length; k++) {
    buffer.writeBigInt64LE(BigInt(labels[k]), 16 + 8 * k);
  }
  fs.writeFileSync(file, buffer);
}

export function readLabels(file: string): number[] {
  const buffer = fs.readFileSync(file);
  if (buffer.length < 16 || buffer.toString('ascii', 0, 4) !== LSMY_MAGIC) {
    throw new Error(`${file}: bad magic or truncated header`);
  }
  if (buffer.readUInt32LE(4) !== VERSION) {
    throw new Error(`${file}: unsupported version`);
  }
  const count = Number(buffer.readBigUInt64LE(8));
  if (buffer.length - 16 !== count * 8) {
    throw new Error(`${file}: payload does not match count`);
  }
  const labels: number[] = [];
  for (let k = 0; k < count; k++) {
    labels.push(Number(buffer.readBigInt64LE(16 + 8 * k)));
  }
  return labels;
}

export interface LayerFiles {
  data: string;
  labels: string;
}

export interface EpochEntry {
  epoch: number;
  layers: Record<string, LayerFiles>;
  train_acc: number | null;
  test_acc: number | null;
}

export interface Manifest {
  run_id: string;
  epochs: EpochEntry[];
}

export function saveManifest(manifest: Manifest, dir: string): string {
  const file = path.join(dir, 'manifest.json');
  fs.writeFileSync(file, JSON.stringify(manifest, null, 2) + '\n');
  return file;
}
