/**
 * Codec for the core library's binary array format.
 *
 * Layout (little-endian): magic "SGT1", one dtype byte (0 = f64, 1 = f32),
 * one ndim byte (1..3), ndim u64 dims, then the row-major payload.
 *
 * The codec never copies payloads: decoding returns a typed-array view over
 * the given bytes, and encoding hands back the caller's own buffer as the
 * payload part. File reads land in a padded allocation so the payload is
 * always 8-byte aligned for the view.
 */

import * as fs from "node:fs";
import * as os from "node:os";

import { DataError, FormatError } from "./errors";

export type ScalarArray = Float64Array | Float32Array;

/** A contiguous row-major array borrowed from the host runtime. */
export interface NdArray {
  data: ScalarArray;
  shape: readonly number[];
}

const MAGIC = Uint8Array.from([0x53, 0x47, 0x54, 0x31]); // "SGT1"
const MAX_ELEMENTS = 2 ** 48;

if (os.endianness() !== "LE") {
  throw new Error("sigcore-bindings requires a little-endian host");
}

export function headerLength(ndim: number): number {
  return 6 + 8 * ndim;
}

function elementCount(shape: readonly number[]): number {
  let count = 1;
  for (const dim of shape) {
    if (!Number.isInteger(dim) || dim < 0) {
      throw new DataError(`bad dimension ${dim} in shape [${shape}]`);
    }
    count *= dim;
  }
  return count;
}

export function checkNdArray(arr: NdArray): void {
  if (!(arr.data instanceof Float64Array) && !(arr.data instanceof Float32Array)) {
    throw new DataError("array data must be a Float64Array or Float32Array");
  }
  if (arr.shape.length < 1 || arr.shape.length > 3) {
    throw new DataError(`arrays must have 1..3 dimensions, got ${arr.shape.length}`);
  }
  if (elementCount(arr.shape) !== arr.data.length) {
    throw new DataError(
      `shape [${arr.shape}] needs ${elementCount(arr.shape)} elements, ` +
      `buffer holds ${arr.data.length}`);
  }
}

/**
 * Encode without copying: the header is fresh, the payload is a byte view
 * over the caller's own buffer (same ArrayBuffer, same address).
 */
export function encodeParts(arr: NdArray): { header: Uint8Array; payload: Uint8Array } {
  checkNdArray(arr);
  const header = new Uint8Array(headerLength(arr.shape.length));
  header.set(MAGIC, 0);
  header[4] = arr.data instanceof Float64Array ? 0 : 1;
  header[5] = arr.shape.length;
  const view = new DataView(header.buffer);
  arr.shape.forEach((dim, i) => view.setBigUint64(6 + 8 * i, BigInt(dim), true));
  const payload = new Uint8Array(arr.data.buffer, arr.data.byteOffset, arr.data.byteLength);
  return { header, payload };
}

/**
 * Decode bytes in place. The returned data is a view: it shares memory with
 * ``bytes`` and is only valid while those bytes live. The payload start must
 * be 8-byte aligned within the underlying ArrayBuffer (readSgt guarantees
 * this); misaligned input is refused rather than silently copied.
 */
export function decode(bytes: Uint8Array): NdArray {
  if (bytes.length < 6) {
    throw new FormatError("buffer too short for header", bytes.length);
  }
  for (let i = 0; i < 4; i++) {
    if (bytes[i] !== MAGIC[i]) {
      throw new FormatError("bad magic", 0);
    }
  }
  const code = bytes[4]!;
  const ndim = bytes[5]!;
  if (code !== 0 && code !== 1) {
    throw new FormatError(`unknown dtype code ${code}`, 4);
  }
  if (ndim < 1 || ndim > 3) {
    throw new FormatError(`ndim must be 1..3, got ${ndim}`, 5);
  }
  const head = headerLength(ndim);
  if (bytes.length < head) {
    throw new FormatError("truncated dims", bytes.length);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const shape: number[] = [];
  let count = 1;
  for (let i = 0; i < ndim; i++) {
    const dim = view.getBigUint64(6 + 8 * i, true);
    if (dim > BigInt(MAX_ELEMENTS)) {
      throw new FormatError(`dims overflow (${dim})`, 6);
    }
    shape.push(Number(dim));
    count *= Number(dim);
  }
  if (count > MAX_ELEMENTS) {
    throw new FormatError(`dims [${shape}] overflow`, 6);
  }
  const itemSize = code === 0 ? 8 : 4;
  if (bytes.length - head !== count * itemSize) {
    throw new FormatError(
      `payload is ${bytes.length - head} bytes, dims [${shape}] require ${count * itemSize}`,
      head);
  }
  const payloadOffset = bytes.byteOffset + head;
  if (payloadOffset % itemSize !== 0) {
    throw new FormatError(
      `payload at buffer offset ${payloadOffset} is not ${itemSize}-byte aligned; ` +
      "read via readSgt for an aligned zero-copy view", head);
  }
  const data = code === 0
    ? new Float64Array(bytes.buffer, payloadOffset, count)
    : new Float32Array(bytes.buffer, payloadOffset, count);
  return { data, shape };
}

/**
 * Read a file into a padded allocation so the decoded payload view is
 * aligned; the returned array borrows that allocation (no payload copy).
 */
export function readSgt(path: string): NdArray {
  const fd = fs.openSync(path, "r");
  try {
    const size = fs.fstatSync(fd).size;
    const prefix = new Uint8Array(6);
    if (size >= 6) {
      fs.readSync(fd, prefix, 0, 6, 0);
    }
    const ndim = prefix[5]!;
    const head = headerLength(ndim >= 1 && ndim <= 3 ? ndim : 1);
    const pad = (8 - (head % 8) + 8) % 8;
    const backing = new Uint8Array(pad + size);
    fs.readSync(fd, backing, pad, size, 0);
    return decode(backing.subarray(pad));
  } finally {
    fs.closeSync(fd);
  }
}

/** Write header and payload straight from the caller's buffer. */
export function writeSgt(path: string, arr: NdArray): void {
  const { header, payload } = encodeParts(arr);
  const fd = fs.openSync(path, "w");
  try {
    fs.writeSync(fd, header);
    fs.writeSync(fd, payload);
  } finally {
    fs.closeSync(fd);
  }
}
