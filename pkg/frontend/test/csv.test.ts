import { readFileSync } from 'fs';
import { join } from 'path';

import { describe, expect, it } from 'vitest';

import { CsvFormatError, parseSweepCsv } from '../src/csv';

const SAMPLE = readFileSync(join(__dirname, '..', 'sample', 'report.csv'), 'utf-8');

describe('parseSweepCsv', () => {
  it('reads every data row of the sample report', () => {
    const rows = parseSweepCsv(SAMPLE, 'fraction');
    expect(rows.length).toBe(SAMPLE.trim().split('\n').length - 1);
    expect(rows[0].scheme).toBe('vectorized_sors');
    expect(rows[0].m0).toBe(400);
    expect(rows[0].metric).toBeCloseTo(0.25, 12);
  });

  it('maps empty mean_iters_success cells to null', () => {
    const rows = parseSweepCsv(SAMPLE, 'mean_iters_success');
    const empty = rows.filter((r) => r.metric === null);
    expect(empty.length).toBeGreaterThan(0);
  });

  it('rejects an empty file', () => {
    expect(() => parseSweepCsv('', 'fraction')).toThrow(CsvFormatError);
    expect(() => parseSweepCsv('', 'fraction')).toThrow(/empty CSV/);
  });

  it('rejects a header-only file', () => {
    const header = SAMPLE.split('\n')[0];
    expect(() => parseSweepCsv(header + '\n', 'fraction')).toThrow(/no data rows/);
  });

  it('names a missing metric column', () => {
    const mangled = SAMPLE.replace('fraction', 'fractal');
    expect(() => parseSweepCsv(mangled, 'fraction')).toThrow(/missing column 'fraction'/);
  });

  it('rejects short rows', () => {
    const header = SAMPLE.split('\n')[0];
    expect(() => parseSweepCsv(header + '\nvectorized_sors,0\n', 'fraction')).toThrow(/fields/);
  });
});
