/**
 * Round-trip through the Python tracker: export a toy run, then invoke
 * `sepscope track` on the manifest and check the series is complete.
 */

import * as assert from 'node:assert/strict';
import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';

import { DEFAULT_SPEC, exportRun } from '../src/exporter';
import { FeedForward, makeBlobs } from '../src/network';

const REPO_ROOT = path.resolve(__dirname, '..', '..', '..');
const PY_SRC = path.join(REPO_ROOT, 'src');

function runTracker(manifest: string, outDir: string) {
  return spawnSync(
    'python3',
    ['-m', 'sepscope', '--out', outDir, '--format', 'csv',
     'track', '--manifest', manifest],
    {
      env: { ...process.env, PYTHONPATH: PY_SRC },
      encoding: 'utf-8',
    },
  );
}

test('exported dump loads via the tracker and yields a complete series', () => {
  const exportDir = fs.mkdtempSync(path.join(os.tmpdir(), 'roundtrip-'));
  const model = new FeedForward([2, 6, 4, 2], 3);
  const result = exportRun(model, makeBlobs(60, 3.0, 5), {
    ...DEFAULT_SPEC,
    layerPatterns: ['h*'],
    probeSize: 50,
    epochs: 2,
    outDir: exportDir,
  });

  const labelFiles = result.files.filter((f) => f.endsWith('.lsmy'));
  assert.equal(labelFiles.length, 2);
  const [first, second] = labelFiles.map((f) =>
    fs.readFileSync(path.join(exportDir, f)),
  );
  assert.deepEqual(first, second);

  const outDir = fs.mkdtempSync(path.join(os.tmpdir(), 'track-'));
  const proc = runTracker(result.manifestFile, outDir);
  assert.equal(proc.status, 0, `tracker failed: ${proc.stderr}`);

  const csv = fs.readFileSync(path.join(outDir, 'track.csv'), 'utf-8');
  const rows = csv.trim().split('\n').map((line) => line.split(','));
  assert.equal(rows.length, 3); // header + 2 epochs
  const header = rows[0];
  assert.ok(header.includes('h1:ls1'));
  assert.ok(header.includes('h2:ls1'));
  for (const row of rows.slice(1)) {
    assert.equal(row.length, header.length);
    const degenerateCols = header
      .map((name, k) => ({ name, k }))
      .filter(({ name }) => name.endsWith(':degenerate'));
    for (const { k } of degenerateCols) {
      assert.equal(row[k], '0', `cell ${header[k]} flagged degenerate`);
    }
    const ls1 = Number(row[header.indexOf('h2:ls1')]);
    assert.ok(ls1 >= 0 && ls1 <= 1);
  }
});
