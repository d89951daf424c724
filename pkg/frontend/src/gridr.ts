/** Decode base64 GRIDR v1 tiles shipped by the layer endpoint. */

export interface DecodedTile {
  width: number;
  height: number;
  cellSize: number;
  origin: [number, number];
  bands: Map<string, Float64Array>;
  nodata: number;
}

function base64ToBytes(data: string): Uint8Array {
  const binary = atob(data);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

export function decodeGridr(base64Data: string): DecodedTile {
  const bytes = base64ToBytes(base64Data);
  const newline = bytes.indexOf(0x0a);
  if (newline < 0) throw new Error("GRIDR tile has no header line");
  const header = JSON.parse(new TextDecoder().decode(bytes.subarray(0, newline)));
  if (header.magic !== "GRIDR" || header.version !== 1) {
    throw new Error(`not a GRIDR v1 tile: ${header.magic}/${header.version}`);
  }
  const n = header.width * header.height;
  const bands = new Map<string, Float64Array>();
  const view = new DataView(bytes.buffer, bytes.byteOffset + newline + 1);
  (header.bands as string[]).forEach((name, b) => {
    const values = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      values[i] = view.getFloat64((b * n + i) * 8, true);
    }
    bands.set(name, values);
  });
  return {
    width: header.width,
    height: header.height,
    cellSize: header.cell_size,
    origin: [header.origin[0], header.origin[1]],
    bands,
    nodata: header.nodata,
  };
}
