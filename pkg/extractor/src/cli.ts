#!/usr/bin/env node
/**
 * backpick-extract <command>
 *
 *   extract  --models <pattern> [--models ...] --data <dir>
 *            --splits <train.txt,val.txt,test.txt> --out <dir>
 *            [--batch-size 32] [--device cpu] [--dataset-meta overrides.csv]
 *   verify   <cache-dir>
 *   describe [--models <pattern>]
 *
 * Exit codes match the engine: 0 ok, 1 usage error, 2 data error.
 */

import { runExtraction } from "./extract";
import { formatReport, verifyCache } from "./verify";
import { ZOO, loadModel, resolveModels, tensorSpecs } from "./zoo";

function usageError(message: string): never {
  process.stderr.write(`backpick-extract: error: ${message}\n`);
  process.exit(1);
}

function parseFlags(argv: string[], known: Set<string>): Map<string, string[]> {
  const flags = new Map<string, string[]>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) usageError(`unexpected argument ${JSON.stringify(arg)}`);
    if (!known.has(arg)) usageError(`unknown flag ${arg}`);
    const value = argv[++i];
    if (value === undefined) usageError(`flag ${arg} needs a value`);
    if (!flags.has(arg)) flags.set(arg, []);
    flags.get(arg)!.push(value);
  }
  return flags;
}

function single(flags: Map<string, string[]>, name: string, fallback?: string): string {
  const values = flags.get(name);
  if (!values) {
    if (fallback !== undefined) return fallback;
    usageError(`missing required flag ${name}`);
  }
  if (values.length > 1) usageError(`flag ${name} given more than once`);
  return values[0];
}

function cmdExtract(argv: string[]): number {
  const flags = parseFlags(
    argv,
    new Set(["--models", "--data", "--splits", "--out", "--batch-size", "--device", "--dataset-meta"])
  );
  const patterns = flags.get("--models") ?? usageError("missing required flag --models");
  const splits = single(flags, "--splits").split(",");
  if (splits.length !== 3) usageError("--splits needs train.txt,val.txt,test.txt");
  const batch = Number(single(flags, "--batch-size", "32"));
  try {
    const summary = runExtraction({
      modelPatterns: patterns,
      dataDir: single(flags, "--data"),
      splitFiles: { train: splits[0], val: splits[1], test: splits[2] },
      outDir: single(flags, "--out"),
      batchSize: batch,
      device: single(flags, "--device", "cpu"),
      overridesCsv: flags.has("--dataset-meta") ? single(flags, "--dataset-meta") : undefined,
    });
    process.stdout.write(
      `extracted ${summary.models.length} model(s) over ${summary.imageCount} image(s)` +
        (summary.skipped.length ? `, skipped ${summary.skipped.length}` : "") +
        `\nregistry: ${summary.registryPath}\ntiming: ${summary.timingPath}\n`
    );
    return 0;
  } catch (err) {
    process.stderr.write(`backpick-extract: ${(err as Error).message}\n`);
    return 2;
  }
}

function cmdVerify(argv: string[]): number {
  if (argv.length !== 1) usageError("verify takes exactly one cache directory");
  const report = verifyCache(argv[0]);
  process.stdout.write(formatReport(report));
  return report.ok ? 0 : 2;
}

function cmdDescribe(argv: string[]): number {
  const flags = parseFlags(argv, new Set(["--models"]));
  const patterns = flags.get("--models") ?? ["*"];
  let specs;
  try {
    specs = resolveModels(patterns);
  } catch (err) {
    process.stderr.write(`backpick-extract: ${(err as Error).message}\n`);
    return 2;
  }
  const described = specs.map((spec) => {
    const model = loadModel(spec);
    return {
      id: spec.id,
      family: spec.family,
      input_size: spec.inputSize,
      grayscale: spec.grayscale,
      width: spec.width,
      feature_dim: spec.featureDim,
      tag: spec.tag,
      tensors: tensorSpecs(spec).map((t) => ({ name: t.name, shape: t.shape })),
      param_count: model.paramCount,
    };
  });
  process.stdout.write(JSON.stringify(described, null, 2) + "\n");
  return 0;
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  switch (command) {
    case "extract":
      return cmdExtract(rest);
    case "verify":
      return cmdVerify(rest);
    case "describe":
      return cmdDescribe(rest);
    default:
      usageError(
        `unknown command ${JSON.stringify(command ?? "")}; commands: extract, verify, describe ` +
          `(zoo models: ${ZOO.map((m) => m.id).join(", ")})`
      );
  }
}

process.exit(main());
