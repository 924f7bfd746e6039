/**
 * Reader for recovery-sweep CSV reports.
 *
 * Expected columns (fixed order is not required, the header is consulted):
 * scheme,m_intermediate,m0,trials,successes,fraction,mean_iters_success,
 * storage_entries,wall_time_s,seed
 */

export interface SweepRow {
  scheme: string;
  mIntermediate: number;
  m0: number;
  /** Metric value, or null when the cell has no value (e.g. no successes). */
  metric: number | null;
}

export const METRICS = ['fraction', 'mean_iters_success'] as const;
export type Metric = (typeof METRICS)[number];

export class CsvFormatError extends Error {}

function splitLine(line: string): string[] {
  return line.split(',').map((f) => f.trim());
}

/** Parse the report and pull out one metric column per row. */
export function parseSweepCsv(text: string, metric: Metric): SweepRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvFormatError('empty CSV: no header row');
  }
  const header = splitLine(lines[0]);
  const need = ['scheme', 'm_intermediate', 'm0', metric];
  const col: Record<string, number> = {};
  for (const name of need) {
    const idx = header.indexOf(name);
    if (idx < 0) {
      throw new CsvFormatError(`missing column '${name}' in CSV header`);
    }
    col[name] = idx;
  }
  if (lines.length === 1) {
    throw new CsvFormatError('empty CSV: header but no data rows');
  }

  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = splitLine(lines[i]);
    if (fields.length < header.length) {
      throw new CsvFormatError(`row ${i + 1}: expected ${header.length} fields, got ${fields.length}`);
    }
    const rawMetric = fields[col[metric]];
    const metricValue = rawMetric === '' ? null : Number(rawMetric);
    if (metricValue !== null && Number.isNaN(metricValue)) {
      throw new CsvFormatError(`row ${i + 1}: cannot parse ${metric} value '${rawMetric}'`);
    }
    const mIntermediate = Number(fields[col['m_intermediate']]);
    const m0 = Number(fields[col['m0']]);
    if (Number.isNaN(mIntermediate) || Number.isNaN(m0)) {
      throw new CsvFormatError(`row ${i + 1}: non-numeric dimension fields`);
    }
    rows.push({
      scheme: fields[col['scheme']],
      mIntermediate,
      m0,
      metric: metricValue,
    });
  }
  return rows;
}
