/** IQDS container writer.
 *
 * Layout (little-endian):
 *   "IQDS" | u32 version=1 | u64 frame_count
 *   u16 mod_count, then per mod u16 name_len + utf-8 name
 *   u16 snr_count, then snr_count x i16
 *   per frame: u16 mod_id, i16 snr_db, 128 interleaved (I, Q) float32 pairs
 */

export interface IqdsFrame {
  modId: number;
  snrDb: number;
  /** interleaved I0,Q0,I1,Q1,... -- 256 floats */
  iq: Float32Array;
}

const FRAME_BYTES = 2 + 2 + 256 * 4;

export function encodeIqds(
  modNames: string[],
  snrValues: number[],
  frames: IqdsFrame[]
): Uint8Array {
  const enc = new TextEncoder();
  const nameBytes = modNames.map((n) => enc.encode(n));
  const headerBytes =
    4 + 4 + 8 +
    2 + nameBytes.reduce((a, b) => a + 2 + b.length, 0) +
    2 + 2 * snrValues.length;
  const out = new Uint8Array(headerBytes + frames.length * FRAME_BYTES);
  const view = new DataView(out.buffer);
  let off = 0;

  out.set(enc.encode("IQDS"), off); off += 4;
  view.setUint32(off, 1, true); off += 4;
  view.setBigUint64(off, BigInt(frames.length), true); off += 8;

  view.setUint16(off, modNames.length, true); off += 2;
  for (const b of nameBytes) {
    view.setUint16(off, b.length, true); off += 2;
    out.set(b, off); off += b.length;
  }
  view.setUint16(off, snrValues.length, true); off += 2;
  for (const s of snrValues) {
    view.setInt16(off, s, true); off += 2;
  }

  for (const f of frames) {
    view.setUint16(off, f.modId, true); off += 2;
    view.setInt16(off, f.snrDb, true); off += 2;
    for (let i = 0; i < 256; i++) {
      view.setFloat32(off, f.iq[i], true); off += 4;
    }
  }
  return out;
}
