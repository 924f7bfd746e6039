/**
 * CLI: read a sweep CSV and write a chart image.
 *
 *   node dist/cli.js --input report.csv --metric fraction --out fig1.png
 *
 * The output format follows the file extension: .png (raster) or .svg.
 */
import { readFileSync, writeFileSync } from 'fs';

import { Resvg } from '@resvg/resvg-js';

import { groupRows, renderSvg } from './chart';
import { METRICS, Metric, parseSweepCsv } from './csv';

export interface PlotSpec {
  input: string;
  metric: Metric;
  out: string;
  width: number;
  height: number;
  title?: string;
}

export function parseArgs(argv: string[]): PlotSpec {
  const spec: PlotSpec = {
    input: '',
    metric: 'fraction',
    out: 'figure.png',
    width: 720,
    height: 480,
  };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) {
        throw new Error(`${arg} needs a value`);
      }
      return argv[++i];
    };
    switch (arg) {
      case '--input':
        spec.input = next();
        break;
      case '--metric': {
        const metric = next();
        if (!(METRICS as readonly string[]).includes(metric)) {
          throw new Error(`--metric must be one of ${METRICS.join(', ')}`);
        }
        spec.metric = metric as Metric;
        break;
      }
      case '--out':
        spec.out = next();
        break;
      case '--width':
        spec.width = Number(next());
        break;
      case '--height':
        spec.height = Number(next());
        break;
      case '--title':
        spec.title = next();
        break;
      case '--help':
        printUsage();
        process.exit(0);
        break;
      default:
        throw new Error(`unknown argument ${arg}`);
    }
  }
  if (!spec.input) {
    throw new Error('--input is required');
  }
  if (!Number.isFinite(spec.width) || !Number.isFinite(spec.height) || spec.width < 100 || spec.height < 100) {
    throw new Error('--width/--height must be at least 100');
  }
  return spec;
}

function printUsage(): void {
  console.log(
    'usage: plot --input report.csv [--metric fraction|mean_iters_success] ' +
      '[--out figure.png] [--width 720] [--height 480] [--title text]',
  );
}

/** Render per the spec; returns the number of legend groups drawn. */
export function render(spec: PlotSpec): number {
  const rows = parseSweepCsv(readFileSync(spec.input, 'utf-8'), spec.metric);
  const groups = groupRows(rows);
  const svg = renderSvg(groups, {
    metric: spec.metric,
    width: spec.width,
    height: spec.height,
    title: spec.title,
  });
  if (spec.out.toLowerCase().endsWith('.svg')) {
    writeFileSync(spec.out, svg, 'utf-8');
  } else {
    const png = new Resvg(svg, { fitTo: { mode: 'width', value: spec.width } }).render().asPng();
    writeFileSync(spec.out, png);
  }
  return groups.length;
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    printUsage();
    return 2;
  }
  try {
    const legendGroups = render(spec);
    console.log(`wrote ${spec.out} (${legendGroups} legend groups, metric ${spec.metric})`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
