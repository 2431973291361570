import * as assert from 'node:assert/strict';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';

import { readLabels, readMatrix, writeLabels, writeMatrix } from '../src/formats';

function tmpFile(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'lsmx-'));
  return path.join(dir, name);
}

test('float64 matrix round-trips bit-exactly', () => {
  const file = tmpFile('m.lsmx');
  const values = Float64Array.from([1.5, -2.25, 1e-200, 3.75, 0.0, 1e200]);
  writeMatrix(2, 3, values, file, 'f8');
  const back = readMatrix(file);
  assert.equal(back.rows, 2);
  assert.equal(back.cols, 3);
  assert.deepEqual(Array.from(back.values), Array.from(values));
});

test('float32 matrix preserves representable values', () => {
  const file = tmpFile('m.lsmx');
  writeMatrix(1, 2, [0.5, 0.25], file, 'f4');
  const back = readMatrix(file);
  assert.deepEqual(Array.from(back.values), [0.5, 0.25]);
});

test('truncated payload is rejected', () => {
  const file = tmpFile('m.lsmx');
  writeMatrix(3, 1, [1, 2, 3], file, 'f4');
  const blob = fs.readFileSync(file);
  fs.writeFileSync(file, blob.subarray(0, blob.length - 4));
  assert.throws(() => readMatrix(file), /payload/);
});

test('bad magic is rejected', () => {
  const file = tmpFile('m.lsmx');
  writeMatrix(1, 1, [1], file);
  const blob = fs.readFileSync(file);
  blob.write('NOPE', 0, 'ascii');
  fs.writeFileSync(file, blob);
  assert.throws(() => readMatrix(file), /magic/);
});

test('labels round-trip', () => {
  const file = tmpFile('y.lsmy');
  writeLabels([0, 1, 2, 1, 0], file);
  assert.deepEqual(readLabels(file), [0, 1, 2, 1, 0]);
});

test('header layout has the documented offsets', () => {
  const file = tmpFile('m.lsmx');
  writeMatrix(2, 1, [1.0, 2.0], file, 'f4');
  const blob = fs.readFileSync(file);
  assert.equal(blob.toString('ascii', 0, 4), 'LSMX');
  assert.equal(blob.readUInt32LE(4), 1);     // version
  assert.equal(blob.readUInt8(8), 1);        // dtype code f4
  assert.equal(blob.readBigUInt64LE(12), 2n); // rows
  assert.equal(blob.readBigUInt64LE(20), 1n); // cols
  assert.equal(blob.length, 28 + 2 * 4);
});
