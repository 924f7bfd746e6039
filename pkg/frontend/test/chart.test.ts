import { readFileSync, mkdtempSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';

import { describe, expect, it } from 'vitest';

import { buildChartOption, groupLabel, groupRows, renderSvg } from '../src/chart';
import { parseSweepCsv } from '../src/csv';
import { render } from '../src/cli';

const SAMPLE_PATH = join(__dirname, '..', 'sample', 'report.csv');
const SAMPLE = readFileSync(SAMPLE_PATH, 'utf-8');

describe('groupRows', () => {
  it('builds one group per (scheme, m_intermediate) pair', () => {
    const rows = parseSweepCsv(SAMPLE, 'fraction');
    const groups = groupRows(rows);
    const distinct = new Set(rows.map((r) => `${r.scheme}|${r.mIntermediate}`));
    expect(groups.length).toBe(distinct.size);
  });

  it('keeps six groups for two schemes times three intermediate dims', () => {
    const rows = [];
    for (const scheme of ['a_sors', 'b_sors']) {
      for (const m of [70, 80, 90]) {
        for (const m0 of [100, 200]) {
          rows.push({ scheme, mIntermediate: m, m0, metric: 0.5 });
        }
      }
    }
    expect(groupRows(rows).length).toBe(6);
  });

  it('sorts points by target dimension and drops null metrics', () => {
    const groups = groupRows([
      { scheme: 's', mIntermediate: 90, m0: 300, metric: 0.9 },
      { scheme: 's', mIntermediate: 90, m0: 100, metric: null },
      { scheme: 's', mIntermediate: 90, m0: 200, metric: 0.4 },
    ]);
    expect(groups.length).toBe(1);
    expect(groups[0].points).toEqual([
      [200, 0.4],
      [300, 0.9],
    ]);
  });

  it('labels vectorized rows without an intermediate dimension', () => {
    expect(groupLabel('vectorized_sors', 0)).toBe('vectorized_sors');
    expect(groupLabel('twostage_sors', 90)).toBe('twostage_sors m=90');
  });
});

describe('buildChartOption', () => {
  it('clamps the fraction axis to [0, 1]', () => {
    const option = buildChartOption([], { metric: 'fraction', width: 400, height: 300 }) as any;
    expect(option.yAxis.min).toBe(0);
    expect(option.yAxis.max).toBe(1);
  });

  it('leaves the iteration axis unclamped', () => {
    const option = buildChartOption([], {
      metric: 'mean_iters_success',
      width: 400,
      height: 300,
    }) as any;
    expect(option.yAxis.min).toBeUndefined();
  });

  it('legend entries equal the group keys', () => {
    const groups = groupRows(parseSweepCsv(SAMPLE, 'fraction'));
    const option = buildChartOption(groups, { metric: 'fraction', width: 400, height: 300 }) as any;
    expect(option.legend.data).toEqual(groups.map((g) => g.key));
    expect(option.series.length).toBe(groups.length);
  });
});

describe('rendering', () => {
  it('produces a well-formed SVG with every group plotted', () => {
    const groups = groupRows(parseSweepCsv(SAMPLE, 'fraction'));
    const svg = renderSvg(groups, { metric: 'fraction', width: 640, height: 420 });
    expect(svg.startsWith('<svg')).toBe(true);
    for (const group of groups) {
      expect(svg).toContain(group.key);
    }
  });

  it('re-running the CLI yields byte-identical output', () => {
    // instance counters make in-process re-renders differ in class names
    // only; the invariant is about re-running the script
    const { execFileSync } = require('child_process');
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    const cli = join(__dirname, '..', 'dist', 'cli.js');
    const outs = [join(dir, 'a.svg'), join(dir, 'b.svg')];
    for (const out of outs) {
      execFileSync(process.execPath, [cli, '--input', SAMPLE_PATH, '--metric', 'fraction', '--out', out]);
    }
    expect(readFileSync(outs[0], 'utf-8')).toBe(readFileSync(outs[1], 'utf-8'));
  });

  it('renders a single-row CSV to a PNG file', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    const single = SAMPLE.split('\n').slice(0, 2).join('\n') + '\n';
    const input = join(dir, 'one.csv');
    const out = join(dir, 'one.png');
    require('fs').writeFileSync(input, single);
    const groupCount = render({ input, metric: 'fraction', out, width: 480, height: 320 });
    expect(groupCount).toBe(1);
    const bytes = readFileSync(out);
    expect(bytes.subarray(1, 4).toString()).toBe('PNG');
  });

  it('renders both figure styles from the sample report', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'));
    for (const metric of ['fraction', 'mean_iters_success'] as const) {
      const out = join(dir, `${metric}.png`);
      const groupCount = render({ input: SAMPLE_PATH, metric, out, width: 720, height: 480 });
      expect(groupCount).toBe(3);
      expect(readFileSync(out).length).toBeGreaterThan(1000);
    }
  });
});
