/**
 * Bound operations over the sigcore core library.
 *
 * Every function serializes its inputs to the core's binary array format,
 * drives one CLI invocation, and decodes the result as a zero-copy view.
 * The bindings do no numeric work: outputs are bit-identical to the core
 * invoked on the same bytes with the same thread count. Pair the forward
 * and backward entrypoints to register custom gradients in a host autodiff
 * framework (see README for a worked example).
 */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { DataError } from "./errors";
import { NdArray, checkNdArray, readSgt, writeSgt } from "./sgt";
import { RunOptions, runCore } from "./runner";

export { CoreUnavailableError, DataError, FormatError, UsageError } from "./errors";
export { NdArray, ScalarArray, decode, encodeParts, readSgt, writeSgt } from "./sgt";
export { RunOptions } from "./runner";

/** Contract version: CLI surface + array format this package speaks. */
export const ABI_VERSION = "sigcore-bindings/1 cli/1 sgt/1";

export type SignatureMethod = "direct" | "horner";
export type TransformKind = "time_augment" | "lead_lag";

export interface SignatureOptions extends RunOptions {
  depth: number;
  method?: SignatureMethod;
  transform?: TransformKind;
}

export interface KernelOptions extends RunOptions {
  dyadicX?: number;
  dyadicY?: number;
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "sigcore-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

function signatureFlags(opts: SignatureOptions): string[] {
  const flags = ["--depth", String(opts.depth)];
  if (opts.method) {
    flags.push("--method", opts.method);
  }
  if (opts.transform === "time_augment") {
    flags.push("--time-aug");
  } else if (opts.transform === "lead_lag") {
    flags.push("--lead-lag");
  }
  return flags;
}

function kernelFlags(opts?: KernelOptions): string[] {
  return [
    "--dyadic-x", String(opts?.dyadicX ?? 0),
    "--dyadic-y", String(opts?.dyadicY ?? 0),
  ];
}

/** Truncated signatures of a path batch (L,d) or (B,L,d). */
export function signature(batch: NdArray, opts: SignatureOptions): NdArray {
  checkNdArray(batch);
  return withTempDir((dir) => {
    const inp = path.join(dir, "in.sgt");
    const out = path.join(dir, "out.sgt");
    writeSgt(inp, batch);
    runCore(["signature", "--input", inp, ...signatureFlags(opts),
             "--output", out], opts);
    return readSgt(out);
  });
}

/** Gradients of <signature, cotangent> w.r.t. the path points. */
export function signatureBackward(batch: NdArray, cotangent: NdArray,
                                  opts: SignatureOptions): NdArray {
  checkNdArray(batch);
  checkNdArray(cotangent);
  return withTempDir((dir) => {
    const inp = path.join(dir, "in.sgt");
    const cot = path.join(dir, "cot.sgt");
    const grad = path.join(dir, "grad.sgt");
    writeSgt(inp, batch);
    writeSgt(cot, cotangent);
    runCore(["signature", "--input", inp, ...signatureFlags(opts),
             "--cotangent", cot, "--grad-output", grad], opts);
    return readSgt(grad);
  });
}

/** Pairwise signature-kernel values for two aligned batches (or one pair). */
export function kernel(x: NdArray, y: NdArray, opts?: KernelOptions): NdArray {
  checkNdArray(x);
  checkNdArray(y);
  return withTempDir((dir) => {
    const fx = path.join(dir, "x.sgt");
    const fy = path.join(dir, "y.sgt");
    const out = path.join(dir, "k.sgt");
    writeSgt(fx, x);
    writeSgt(fy, y);
    runCore(["kernel", "--input", fx, "--input2", fy, ...kernelFlags(opts),
             "--output", out], opts);
    return readSgt(out);
  });
}

/** Exact kernel gradients w.r.t. both inputs, scaled by the cotangent. */
export function kernelBackward(
  x: NdArray, y: NdArray, cotangent: NdArray | number,
  opts?: KernelOptions,
): { gradX: NdArray; gradY: NdArray } {
  checkNdArray(x);
  checkNdArray(y);
  const cot: NdArray = typeof cotangent === "number"
    ? { data: Float64Array.of(cotangent), shape: [1] }
    : cotangent;
  checkNdArray(cot);
  return withTempDir((dir) => {
    const fx = path.join(dir, "x.sgt");
    const fy = path.join(dir, "y.sgt");
    const fc = path.join(dir, "cot.sgt");
    const gx = path.join(dir, "gx.sgt");
    const gy = path.join(dir, "gy.sgt");
    writeSgt(fx, x);
    writeSgt(fy, y);
    writeSgt(fc, cot);
    runCore(["kernel", "--input", fx, "--input2", fy, ...kernelFlags(opts),
             "--cotangent", fc, "--grad-output-x", gx, "--grad-output-y", gy],
            opts);
    return { gradX: readSgt(gx), gradY: readSgt(gy) };
  });
}

/** Gram matrix of kernel values; symmetric when y is omitted. */
export function gram(x: NdArray, y?: NdArray, opts?: KernelOptions): NdArray {
  checkNdArray(x);
  if (y !== undefined) {
    checkNdArray(y);
  }
  return withTempDir((dir) => {
    const fx = path.join(dir, "x.sgt");
    const out = path.join(dir, "g.sgt");
    writeSgt(fx, x);
    const args = ["gram", "--input", fx, ...kernelFlags(opts), "--output", out];
    if (y !== undefined) {
      const fy = path.join(dir, "y.sgt");
      writeSgt(fy, y);
      args.push("--input2", fy);
    }
    runCore(args, opts);
    return readSgt(out);
  });
}

/** Materialize a path transform. */
export function transform(batch: NdArray, kind: TransformKind,
                          opts?: RunOptions): NdArray {
  checkNdArray(batch);
  if (kind !== "time_augment" && kind !== "lead_lag") {
    throw new DataError(`unknown transform kind ${kind}`);
  }
  return withTempDir((dir) => {
    const inp = path.join(dir, "in.sgt");
    const out = path.join(dir, "out.sgt");
    writeSgt(inp, batch);
    runCore(["transform", "--kind", kind, "--input", inp, "--output", out], opts);
    return readSgt(out);
  });
}
