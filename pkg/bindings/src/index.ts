/**
 * In-memory tabular interface to the procsim pipeline.
 *
 * The wrapper contains zero simulation logic: every call shells out to the
 * `procsim` command-line tool (via `python3 -m procsim`), exchanging data
 * through temporary CSV/PNML/profile files. Outputs are therefore exactly
 * what the CLI produces, row for row and byte for byte.
 *
 * @example
 * import { simulateLog } from "procsim-bindings";
 *
 * const simulated = simulateLog(eventTable, { cases: 100, seed: 42 });
 * console.log(simulated.rows.length);
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { parseCsv, serializeTable, type Table } from "./csv.js";

export { parseCsv, serializeTable, type Table } from "./csv.js";

export const version = "0.1.0";

/** Options mirroring the CLI's `simulate` flags. */
export interface SimulateOptions {
  /** Number of cases to generate (CLI default: 1000). */
  cases?: number;
  /** Random seed (CLI default: 0). */
  seed?: number;
  /** Replace the mined inter-arrival model with mean SECONDS (normal). */
  arrival?: number;
  /** Pin activities to constant service times, in seconds. */
  durations?: Record<string, number>;
  /** Station capacities per activity (default 1 each). */
  capacities?: Record<string, number>;
  /** Calendar instant of simulation clock zero, "YYYY-MM-DD HH:MM:SS". */
  anchor?: string;
  /** Business-hours calendar, e.g. "Mon-Fri 09:00-17:00" or "24/7". */
  businessHours?: string;
  /** Include the start_timestamp column (default true). */
  startColumn?: boolean;
}

export interface DiscoverResult {
  /** The discovered workflow net as a PNML document. */
  pnml: string;
  /** The mined performance profile in the CLI's INI format. */
  profile: string;
}

function runCli(args: string[]): void {
  const python = process.env.PROCSIM_PYTHON ?? "python3";
  const result = spawnSync(python, ["-m", "procsim", ...args], {
    encoding: "utf8",
  });
  if (result.error) {
    throw new Error(`failed to launch ${python}: ${result.error.message}`);
  }
  if (result.status !== 0) {
    const detail = (result.stderr || result.stdout || "").trim();
    throw new Error(`procsim exited with status ${result.status}: ${detail}`);
  }
}

function withWorkDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "procsim-"));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function simulateArgs(options: SimulateOptions): string[] {
  const args: string[] = [];
  if (options.cases !== undefined) args.push("--cases", String(options.cases));
  if (options.seed !== undefined) args.push("--seed", String(options.seed));
  if (options.arrival !== undefined) {
    args.push("--arrival", String(options.arrival));
  }
  for (const [activity, seconds] of Object.entries(options.durations ?? {})) {
    args.push("--duration", `${activity}=${seconds}`);
  }
  for (const [activity, slots] of Object.entries(options.capacities ?? {})) {
    args.push("--capacity", `${activity}=${slots}`);
  }
  if (options.anchor !== undefined) args.push("--anchor", options.anchor);
  if (options.businessHours !== undefined) {
    args.push("--business-hours", options.businessHours);
  }
  if (options.startColumn === false) args.push("--no-start-column");
  return args;
}

/**
 * Simulate a synthetic event log from an observed one.
 *
 * Discovers the net and performance profile from `input`, then simulates
 * per `options`. Returns the simulated log as a table identical to the
 * CLI's output CSV.
 */
export function simulateLog(
  input: Table,
  options: SimulateOptions = {},
): Table {
  return withWorkDir((dir) => {
    const inPath = join(dir, "in.csv");
    const outPath = join(dir, "out.csv");
    writeFileSync(inPath, serializeTable(input));
    runCli([
      "simulate",
      "--in",
      inPath,
      "--out",
      outPath,
      ...simulateArgs(options),
    ]);
    return parseCsv(readFileSync(outPath, "utf8"));
  });
}

/**
 * Discover a workflow net and performance profile from an event log.
 *
 * Returns the same PNML and profile documents the CLI's `discover`
 * subcommand writes.
 */
export function discover(input: Table): DiscoverResult {
  return withWorkDir((dir) => {
    const inPath = join(dir, "in.csv");
    const pnmlPath = join(dir, "net.pnml");
    const profilePath = join(dir, "profile.ini");
    writeFileSync(inPath, serializeTable(input));
    runCli([
      "discover",
      "--in",
      inPath,
      "--pnml",
      pnmlPath,
      "--profile",
      profilePath,
    ]);
    return {
      pnml: readFileSync(pnmlPath, "utf8"),
      profile: readFileSync(profilePath, "utf8"),
    };
  });
}
