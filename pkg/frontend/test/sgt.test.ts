import { describe, expect, it } from "vitest";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { FormatError } from "../src/errors";
import { NdArray, decode, encodeParts, headerLength, readSgt, writeSgt } from "../src/sgt";

function tempFile(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "sgt-test-"));
  return path.join(dir, name);
}

function alignedBytes(arr: NdArray): Uint8Array {
  // lay the encoded form out so the payload starts 8-byte aligned
  const { header, payload } = encodeParts(arr);
  const pad = (8 - (header.length % 8)) % 8;
  const backing = new Uint8Array(pad + header.length + payload.length);
  backing.set(header, pad);
  backing.set(payload, pad + header.length);
  return backing.subarray(pad);
}

describe("codec", () => {
  it("round-trips f64 arrays of every rank", () => {
    for (const shape of [[5], [2, 3], [2, 3, 4]]) {
      const count = shape.reduce((a, b) => a * b, 1);
      const data = Float64Array.from({ length: count }, (_, i) => Math.sin(i + 1));
      const back = decode(alignedBytes({ data, shape }));
      expect(back.shape).toEqual(shape);
      expect(Array.from(back.data)).toEqual(Array.from(data));
    }
  });

  it("round-trips f32", () => {
    const data = Float32Array.from([1.5, -2.25, 3.125, 0]);
    const back = decode(alignedBytes({ data, shape: [2, 2] }));
    expect(back.data).toBeInstanceOf(Float32Array);
    expect(Array.from(back.data)).toEqual(Array.from(data));
  });

  it("decodes as a zero-copy view (address identity)", () => {
    const data = Float64Array.from([1, 2, 3, 4, 5, 6]);
    const bytes = alignedBytes({ data, shape: [3, 2] });
    const back = decode(bytes);
    expect(back.data.buffer).toBe(bytes.buffer); // same allocation, no copy
    // mutating the backing bytes is visible through the view
    new Float64Array(bytes.buffer, bytes.byteOffset + headerLength(2), 6)[0] = 42;
    expect(back.data[0]).toBe(42);
  });

  it("encodes the caller's buffer as the payload (address identity)", () => {
    const data = Float64Array.from([7, 8, 9]);
    const { payload } = encodeParts({ data, shape: [3] });
    expect(payload.buffer).toBe(data.buffer);
    expect(payload.byteOffset).toBe(data.byteOffset);
    expect(payload.byteLength).toBe(data.byteLength);
  });

  it("refuses misaligned views instead of copying", () => {
    const data = Float64Array.from([1, 2]);
    const { header, payload } = encodeParts({ data, shape: [2] });
    const raw = new Uint8Array(header.length + payload.length); // offset 0: 14-byte header
    raw.set(header, 0);
    raw.set(payload, header.length);
    expect(() => decode(raw)).toThrow(FormatError);
  });

  it("reports bad magic at offset 0", () => {
    const raw = new Uint8Array(20);
    raw.set([0x58, 0x58, 0x58, 0x58], 0);
    try {
      decode(raw);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(FormatError);
      expect((err as FormatError).offset).toBe(0);
    }
  });

  it("reports bad ndim at offset 5", () => {
    const good = alignedBytes({ data: Float64Array.from([1]), shape: [1] });
    const raw = Uint8Array.from(good);
    raw[5] = 7;
    try {
      decode(raw);
      expect.unreachable();
    } catch (err) {
      expect((err as FormatError).offset).toBe(5);
    }
  });

  it("rejects truncated payloads", () => {
    const good = alignedBytes({ data: Float64Array.from([1, 2, 3]), shape: [3] });
    expect(() => decode(good.subarray(0, good.length - 8))).toThrow(FormatError);
  });

  it("rejects shape/buffer mismatches on encode", () => {
    expect(() => encodeParts({ data: Float64Array.from([1, 2]), shape: [3] }))
      .toThrow(/needs 3 elements/);
  });
});

describe("file io", () => {
  it("write/read round-trip preserves bytes and stays zero-copy", () => {
    const file = tempFile("a.sgt");
    const data = Float64Array.from({ length: 24 }, (_, i) => i / 7);
    writeSgt(file, { data, shape: [2, 3, 4] });
    const back = readSgt(file);
    expect(back.shape).toEqual([2, 3, 4]);
    expect(Array.from(back.data)).toEqual(Array.from(data));
    // the decoded data is a view into the read allocation, 8-byte aligned
    expect(back.data.byteOffset % 8).toBe(0);
    expect(back.data.buffer.byteLength).toBeGreaterThanOrEqual(back.data.byteLength);
  });

  it("read rejects a corrupt file", () => {
    const file = tempFile("bad.sgt");
    fs.writeFileSync(file, Buffer.from("XXXXnothing here"));
    expect(() => readSgt(file)).toThrow(FormatError);
  });
});
