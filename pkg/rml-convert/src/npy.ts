/** Minimal .npy reader for the little-endian float32 C-order arrays the
 * RadioML archive contains. */

const MAGIC = "\x93NUMPY";

export interface NpyArray {
  data: Float32Array;
  shape: number[];
}

function parseHeaderDict(raw: string) {
  const descr = /'descr':\s*'([^']+)'/.exec(raw)?.[1] ?? "";
  const fortran = /'fortran_order':\s*(True|False)/.exec(raw)?.[1] === "True";
  const shapeText = /'shape':\s*\(([^)]*)\)/.exec(raw)?.[1] ?? "";
  const shape = shapeText
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => Number.parseInt(s, 10));
  return { descr, fortran, shape };
}

export function parseNpy(bytes: Uint8Array, name: string): NpyArray {
  if (bytes.length < 10) {
    throw new Error(`${name}: too short to be a .npy file`);
  }
  const magic = String.fromCharCode(...bytes.subarray(0, 6));
  if (magic !== MAGIC) {
    throw new Error(`${name}: bad .npy magic`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const major = view.getUint8(6);
  if (major !== 1 && major !== 2) {
    throw new Error(`${name}: unsupported .npy version ${major}`);
  }
  const headerLen = major === 1 ? view.getUint16(8, true) : view.getUint32(8, true);
  const headerStart = major === 1 ? 10 : 12;
  const header = new TextDecoder().decode(
    bytes.subarray(headerStart, headerStart + headerLen)
  );
  const { descr, fortran, shape } = parseHeaderDict(header);
  if (fortran) {
    throw new Error(`${name}: fortran-ordered arrays are not supported`);
  }
  if (descr !== "<f4") {
    throw new Error(`${name}: dtype must be little-endian float32 ('<f4'), got '${descr}'`);
  }
  const count = shape.reduce((a, b) => a * b, 1);
  const dataStart = headerStart + headerLen;
  if (bytes.length - dataStart < count * 4) {
    throw new Error(`${name}: payload truncated (${bytes.length - dataStart} bytes for ${count} floats)`);
  }
  // copy so alignment of the zip slice never matters
  const data = new Float32Array(
    bytes.slice(dataStart, dataStart + count * 4).buffer
  );
  return { data, shape };
}
