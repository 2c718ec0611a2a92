/** Spawns the core CLI and maps its exit codes onto typed errors. */

import { spawnSync, SpawnSyncReturns } from "node:child_process";

import { CoreUnavailableError, DataError, UsageError } from "./errors";

/** Options shared by every bound operation. */
export interface RunOptions {
  /** Worker threads for the core computation (--threads). */
  threads?: number;
}

function coreCommand(): string[] {
  const override = process.env.SIGCORE_CLI;
  if (override) {
    return override.split(" ").filter((s) => s.length > 0);
  }
  return ["sigcore"];
}

function spawn(cmd: string[], args: string[]): SpawnSyncReturns<string> {
  return spawnSync(cmd[0]!, [...cmd.slice(1), ...args], {
    encoding: "utf8",
    maxBuffer: 1 << 26,
  });
}

/** Run one CLI invocation; throws on any non-zero exit. */
export function runCore(args: string[], opts?: RunOptions): string {
  const full = [...args];
  if (opts?.threads !== undefined) {
    full.push("--threads", String(opts.threads));
  }
  let result = spawn(coreCommand(), full);
  const notFound = result.error && (result.error as NodeJS.ErrnoException).code === "ENOENT";
  if (notFound && !process.env.SIGCORE_CLI) {
    result = spawn(["python3", "-m", "sigcore.cli"], full);
  }
  if (result.error) {
    throw new CoreUnavailableError(
      `cannot spawn the sigcore CLI (${result.error.message}); ` +
      "install the core package or point SIGCORE_CLI at it");
  }
  if (result.status === 2) {
    throw new UsageError(result.stderr.trim());
  }
  if (result.status !== 0) {
    throw new DataError(result.stderr.trim());
  }
  return result.stdout;
}
