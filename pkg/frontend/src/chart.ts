/**
 * Grouping and rendering: one curve per (scheme, intermediate dimension)
 * pair, target dimension on the x axis.
 */
import * as echarts from 'echarts';

import { Metric, SweepRow } from './csv';

export interface SeriesGroup {
  key: string;
  points: Array<[number, number]>;
}

/** Legend label: schemes without an intermediate stage omit the m part. */
export function groupLabel(scheme: string, mIntermediate: number): string {
  return mIntermediate > 0 ? `${scheme} m=${mIntermediate}` : scheme;
}

/** One series per distinct (scheme, m_intermediate), points sorted by m0. */
export function groupRows(rows: SweepRow[]): SeriesGroup[] {
  const byKey = new Map<string, Array<[number, number]>>();
  for (const row of rows) {
    const key = groupLabel(row.scheme, row.mIntermediate);
    if (!byKey.has(key)) {
      byKey.set(key, []);
    }
    if (row.metric !== null) {
      byKey.get(key)!.push([row.m0, row.metric]);
    }
  }
  return [...byKey.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([key, points]) => ({
      key,
      points: points.sort((p, q) => p[0] - q[0]),
    }));
}

const METRIC_TITLES: Record<Metric, string> = {
  fraction: 'Fraction of runs recovered',
  mean_iters_success: 'Mean iterations among recovered runs',
};

export interface ChartConfig {
  metric: Metric;
  width: number;
  height: number;
  title?: string;
}

/** Build the full echarts option document for a grouped sweep. */
export function buildChartOption(groups: SeriesGroup[], config: ChartConfig): echarts.EChartsCoreOption {
  const yAxis: Record<string, unknown> = {
    type: 'value',
    name: METRIC_TITLES[config.metric],
    nameLocation: 'middle',
    nameGap: 45,
  };
  if (config.metric === 'fraction') {
    yAxis.min = 0;
    yAxis.max = 1;
  }
  return {
    animation: false,
    backgroundColor: '#ffffff',
    title: {
      text: config.title ?? METRIC_TITLES[config.metric],
      left: 'center',
    },
    legend: {
      bottom: 0,
      data: groups.map((g) => g.key),
    },
    grid: { left: 70, right: 25, top: 45, bottom: 70 },
    xAxis: {
      type: 'value',
      name: 'target dimension m0',
      nameLocation: 'middle',
      nameGap: 28,
      scale: true,
    },
    yAxis,
    series: groups.map((g) => ({
      name: g.key,
      type: 'line',
      symbol: 'circle',
      symbolSize: 7,
      data: g.points,
    })),
  };
}

/** Render the option to an SVG string; pure given its inputs. */
export function renderSvg(groups: SeriesGroup[], config: ChartConfig): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: config.width,
    height: config.height,
  });
  try {
    chart.setOption(buildChartOption(groups, config));
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
