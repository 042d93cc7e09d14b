import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { zipSync } from "fflate";
import { describe, expect, it } from "vitest";

import { convert, loadArchive, validate, ValidationError } from "../src/convert.js";

function tmp(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "rmlconv-")), name);
}

/** Serialize a float32 array as a v1 .npy file. */
function npyBytes(shape: number[], values: Float32Array): Uint8Array {
  let header =
    `{'descr': '<f4', 'fortran_order': False, 'shape': (${shape.join(", ")},), }`;
  const unpadded = 10 + header.length + 1;
  header += " ".repeat((64 - (unpadded % 64)) % 64) + "\n";
  const out = new Uint8Array(10 + header.length + values.length * 4);
  out.set([0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59, 1, 0]); // \x93NUMPY v1.0
  new DataView(out.buffer).setUint16(8, header.length, true);
  out.set(new TextEncoder().encode(header), 10);
  out.set(new Uint8Array(values.buffer, values.byteOffset, values.length * 4),
          10 + header.length);
  return out;
}

function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (Math.imul(s, 1664525) + 1013904223) >>> 0;
    return s / 2 ** 32 - 0.5;
  };
}

function cellValues(count: number, seed: number): Float32Array {
  const rand = lcg(seed);
  const v = new Float32Array(count * 256);
  for (let i = 0; i < v.length; i++) v[i] = rand();
  return v;
}

/** Archive with every (mod, snr) cell holding `count` random 2x128 frames. */
function miniArchive(
  path: string,
  mods: string[],
  snrs: number[],
  count: number,
  mutate?: (files: Record<string, Uint8Array>) => void
): Map<string, Float32Array> {
  const files: Record<string, Uint8Array> = {};
  const expected = new Map<string, Float32Array>();
  let seed = 1;
  for (const mod of mods) {
    for (const snr of snrs) {
      const v = cellValues(count, seed++);
      files[`${mod}_${snr}.npy`] = npyBytes([count, 2, 128], v);
      expected.set(`${mod}_${snr}`, v);
    }
  }
  if (mutate) mutate(files);
  writeFileSync(path, zipSync(files, { level: 0 }));
  return expected;
}

describe("loadArchive", () => {
  it("rejects a non-zip file", () => {
    const p = tmp("junk.npz");
    writeFileSync(p, "definitely not a zip");
    expect(() => loadArchive(p)).toThrow(ValidationError);
  });

  it("rejects misnamed entries, listing them", () => {
    const p = tmp("bad.npz");
    miniArchive(p, ["BPSK"], [0], 1, (files) => {
      files["notes.txt"] = new TextEncoder().encode("hi");
    });
    expect(() => loadArchive(p)).toThrow(/notes\.txt/);
  });

  it("rejects wrong frame shapes", () => {
    const p = tmp("shape.npz");
    const files = {
      "BPSK_0.npy": npyBytes([2, 2, 64], new Float32Array(2 * 2 * 64)),
    };
    writeFileSync(p, zipSync(files, { level: 0 }));
    expect(() => loadArchive(p)).toThrow(/\(2, 2, 64\)/);
  });

  it("rejects non-f4 dtypes", () => {
    const p = tmp("dtype.npz");
    const patched = npyBytes([1, 2, 128], new Float32Array(256));
    // overwrite the '4' of '<f4' in the header with '8', bytes only
    const idx = patched.findIndex(
      (b, i) => b === 0x3c && patched[i + 1] === 0x66 && patched[i + 2] === 0x34
    );
    patched[idx + 2] = 0x38;
    writeFileSync(p, zipSync({ "BPSK_0.npy": patched }, { level: 0 }));
    expect(() => loadArchive(p)).toThrow(/<f8/);
  });
});

describe("validate", () => {
  it("flags missing grid cells by name", () => {
    const p = tmp("gap.npz");
    miniArchive(p, ["8PSK", "BPSK"], [-2, 0], 1, (files) => {
      delete files["BPSK_-2.npy"];
    });
    expect(() => validate(loadArchive(p))).toThrow(/BPSK_-2/);
  });

  it("refuses NaN samples", () => {
    const p = tmp("nan.npz");
    const v = cellValues(1, 9);
    v[17] = NaN;
    writeFileSync(p, zipSync({ "QPSK_4.npy": npyBytes([1, 2, 128], v) }, { level: 0 }));
    expect(() => validate(loadArchive(p))).toThrow(/QPSK_4/);
  });

  it("empty archive is an error", () => {
    const p = tmp("empty.npz");
    writeFileSync(p, zipSync({}, { level: 0 }));
    expect(() => loadArchive(p)).toThrow(/no \(mod, snr\) cells/);
  });
});

describe("convert", () => {
  it("writes a mini archive with alphabetical ids and sorted snrs", () => {
    const inp = tmp("mini.npz");
    const out = tmp("mini.iqds");
    miniArchive(inp, ["QPSK", "BPSK"], [4, -2], 3);
    const summary = convert(inp, out);
    expect(summary.framesWritten).toBe(2 * 2 * 3);
    expect(summary.mods).toEqual(["BPSK", "QPSK"]);
    expect(summary.snrs).toEqual([-2, 4]);
  });

  it("sample values survive bit-exactly as f32", () => {
    const inp = tmp("exact.npz");
    const out = tmp("exact.iqds");
    const expected = miniArchive(inp, ["BPSK", "QPSK"], [-2, 4], 3);
    convert(inp, out);

    const buf = readFileSync(out);
    const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
    expect(buf.subarray(0, 4).toString()).toBe("IQDS");
    // header: magic+version+count, 2-name table, 2-snr table
    let off = 4 + 4 + 8 + 2;
    const names: string[] = [];
    for (let i = 0; i < 2; i++) {
      const len = view.getUint16(off, true);
      names.push(buf.subarray(off + 2, off + 2 + len).toString());
      off += 2 + len;
    }
    const nSnr = view.getUint16(off, true);
    off += 2 + 2 * nSnr;

    for (let rec = 0; rec < 12; rec++) {
      const modId = view.getUint16(off, true);
      const snr = view.getInt16(off + 2, true);
      const frameInCell = rec % 3;
      const source = expected.get(`${names[modId]}_${snr}`)!;
      for (let t = 0; t < 128; t++) {
        const i = view.getUint32(off + 4 + 8 * t, true);
        const q = view.getUint32(off + 4 + 8 * t + 4, true);
        const srcView = new DataView(source.buffer);
        // interleaved (I, Q) pairs vs the archive's I row then Q row
        expect(i).toBe(srcView.getUint32((frameInCell * 256 + t) * 4, true));
        expect(q).toBe(srcView.getUint32((frameInCell * 256 + 128 + t) * 4, true));
      }
      off += 4 + 1024;
    }
    expect(off).toBe(buf.byteLength);
  });

  it("converted file loads in the Python package", () => {
    const inp = tmp("integ.npz");
    const out = tmp("integ.iqds");
    miniArchive(inp, ["AM-DSB", "GFSK", "WBFM"], [-6, 0, 6], 2);
    convert(inp, out);
    const text = execFileSync(
      "python3", ["-m", "cplxnet.cli", "convert-info", out],
      { encoding: "utf8" }
    );
    expect(text).toContain("18 frames");
    expect(text).toContain("AM-DSB=6");
    expect(text).toContain("-6, 0, 6");
  });

  it("full 11x20 grid converts with frames = mods x snrs x count", () => {
    const mods = ["8PSK", "AM-DSB", "AM-SSB", "BPSK", "CPFSK", "GFSK",
                  "PAM4", "QAM16", "QAM64", "QPSK", "WBFM"];
    const snrs = [];
    for (let s = -20; s < 20; s += 2) snrs.push(s);
    const inp = tmp("full.npz");
    const out = tmp("full.iqds");
    miniArchive(inp, mods, snrs, 50);
    const summary = convert(inp, out);
    expect(summary.framesWritten).toBe(11 * 20 * 50);
    expect(summary.mods).toEqual(mods);
    expect(summary.snrs).toEqual(snrs);
  });

  it("deflated archives also convert", () => {
    const inp = tmp("deflate.npz");
    const out = tmp("deflate.iqds");
    const files: Record<string, Uint8Array> = {
      "BPSK_0.npy": npyBytes([2, 2, 128], cellValues(2, 5)),
    };
    writeFileSync(inp, zipSync(files, { level: 6 }));
    expect(convert(inp, out).framesWritten).toBe(2);
  });
});
