import { readFileSync, writeFileSync } from "node:fs";
import { unzipSync } from "fflate";

import { encodeIqds, IqdsFrame } from "./iqds.js";
import { parseNpy } from "./npy.js";

export interface Summary {
  framesWritten: number;
  mods: string[];
  snrs: number[];
}

export class ValidationError extends Error {}

interface Cell {
  mod: string;
  snr: number;
  frames: Float32Array[]; // each 2x128, row-major (I row then Q row)
}

/** "QAM16_-12.npy" -> { mod: "QAM16", snr: -12 } */
function parseEntryName(name: string): { mod: string; snr: number } | null {
  const m = /^(.+)_(-?\d+)\.npy$/.exec(name);
  if (!m) return null;
  return { mod: m[1], snr: Number.parseInt(m[2], 10) };
}

export function loadArchive(path: string): Cell[] {
  let files: Record<string, Uint8Array>;
  try {
    files = unzipSync(new Uint8Array(readFileSync(path)));
  } catch (e) {
    throw new ValidationError(`${path}: not a readable .npz archive (${(e as Error).message})`);
  }

  const cells: Cell[] = [];
  const badNames: string[] = [];
  for (const [name, bytes] of Object.entries(files)) {
    const key = parseEntryName(name);
    if (!key) {
      badNames.push(name);
      continue;
    }
    const arr = parseNpy(bytes, name);
    if (arr.shape.length !== 3 || arr.shape[1] !== 2 || arr.shape[2] !== 128) {
      throw new ValidationError(
        `${name}: expected shape (count, 2, 128), got (${arr.shape.join(", ")})`
      );
    }
    const frames: Float32Array[] = [];
    for (let k = 0; k < arr.shape[0]; k++) {
      frames.push(arr.data.subarray(k * 256, (k + 1) * 256));
    }
    cells.push({ mod: key.mod, snr: key.snr, frames });
  }
  if (badNames.length > 0) {
    throw new ValidationError(
      `entries not named <MOD>_<SNR>.npy: ${badNames.sort().join(", ")}`
    );
  }
  if (cells.length === 0) {
    throw new ValidationError(`${path}: archive contains no (mod, snr) cells`);
  }
  return cells;
}

export function validate(cells: Cell[]): { mods: string[]; snrs: number[] } {
  const mods = [...new Set(cells.map((c) => c.mod))].sort();
  const snrs = [...new Set(cells.map((c) => c.snr))].sort((a, b) => a - b);

  const have = new Set(cells.map((c) => `${c.mod}_${c.snr}`));
  const missing: string[] = [];
  for (const mod of mods) {
    for (const snr of snrs) {
      if (!have.has(`${mod}_${snr}`)) missing.push(`${mod}_${snr}`);
    }
  }
  if (missing.length > 0) {
    throw new ValidationError(`missing (mod, snr) cells: ${missing.join(", ")}`);
  }
  const dupes = cells.length - have.size;
  if (dupes > 0) {
    throw new ValidationError(`${dupes} duplicate (mod, snr) entries in archive`);
  }

  const nanCells: string[] = [];
  for (const c of cells) {
    if (c.frames.some((f) => f.some((v) => Number.isNaN(v)))) {
      nanCells.push(`${c.mod}_${c.snr}`);
    }
  }
  if (nanCells.length > 0) {
    throw new ValidationError(`NaN sample values in: ${nanCells.sort().join(", ")}`);
  }
  return { mods, snrs };
}

export function convert(inputPath: string, outputPath: string): Summary {
  const cells = loadArchive(inputPath);
  const { mods, snrs } = validate(cells);
  const modId = new Map(mods.map((m, i) => [m, i]));

  const byKey = new Map(cells.map((c) => [`${c.mod}_${c.snr}`, c]));
  const frames: IqdsFrame[] = [];
  for (const mod of mods) {
    for (const snr of snrs) {
      const cell = byKey.get(`${mod}_${snr}`)!;
      for (const f of cell.frames) {
        // archive rows are [I x128, Q x128]; the container interleaves pairs
        const iq = new Float32Array(256);
        for (let t = 0; t < 128; t++) {
          iq[2 * t] = f[t];
          iq[2 * t + 1] = f[128 + t];
        }
        frames.push({ modId: modId.get(mod)!, snrDb: snr, iq });
      }
    }
  }
  writeFileSync(outputPath, encodeIqds(mods, snrs, frames));
  return { framesWritten: frames.length, mods, snrs };
}
