/**
 * Minimal decoder for binary netpbm images: P6 (RGB) and P5 (grayscale),
 * 8-bit only.  Hand-rolled so the extractor needs no image dependency;
 * test fixtures are written in the same format.
 */

export interface Image {
  width: number;
  height: number;
  /** Row-major RGB triples in [0, 1]; grayscale images replicate the channel. */
  pixels: Float64Array;
}

export function decodeNetpbm(data: Buffer, name: string): Image {
  const magic = data.subarray(0, 2).toString("ascii");
  if (magic !== "P6" && magic !== "P5") {
    throw new Error(`${name}: unsupported image magic ${JSON.stringify(magic)} (need P5/P6)`);
  }
  // Header: magic, width, height, maxval as whitespace-separated tokens,
  // with # comments allowed; one whitespace byte ends the header.
  let pos = 2;
  const tokens: number[] = [];
  while (tokens.length < 3) {
    if (pos >= data.length) throw new Error(`${name}: truncated header`);
    const byte = data[pos];
    if (byte === 0x23) {
      while (pos < data.length && data[pos] !== 0x0a) pos++;
      pos++;
      continue;
    }
    if (byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d) {
      pos++;
      continue;
    }
    let value = 0;
    let digits = 0;
    while (pos < data.length && data[pos] >= 0x30 && data[pos] <= 0x39) {
      value = value * 10 + (data[pos] - 0x30);
      digits++;
      pos++;
    }
    if (digits === 0) throw new Error(`${name}: malformed header`);
    tokens.push(value);
  }
  pos++; // the single whitespace after maxval
  const [width, height, maxval] = tokens;
  if (maxval !== 255) throw new Error(`${name}: only maxval 255 supported, got ${maxval}`);
  const channels = magic === "P6" ? 3 : 1;
  const expected = width * height * channels;
  if (data.length - pos < expected) {
    throw new Error(`${name}: expected ${expected} pixel bytes, got ${data.length - pos}`);
  }
  const pixels = new Float64Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    if (channels === 3) {
      pixels[i * 3] = data[pos + i * 3] / 255;
      pixels[i * 3 + 1] = data[pos + i * 3 + 1] / 255;
      pixels[i * 3 + 2] = data[pos + i * 3 + 2] / 255;
    } else {
      const v = data[pos + i] / 255;
      pixels[i * 3] = v;
      pixels[i * 3 + 1] = v;
      pixels[i * 3 + 2] = v;
    }
  }
  return { width, height, pixels };
}

/** Nearest-neighbor resize to size x size RGB. */
export function resize(image: Image, size: number): Float64Array {
  const out = new Float64Array(size * size * 3);
  for (let y = 0; y < size; y++) {
    const sy = Math.min(image.height - 1, Math.floor((y * image.height) / size));
    for (let x = 0; x < size; x++) {
      const sx = Math.min(image.width - 1, Math.floor((x * image.width) / size));
      const src = (sy * image.width + sx) * 3;
      const dst = (y * size + x) * 3;
      out[dst] = image.pixels[src];
      out[dst + 1] = image.pixels[src + 1];
      out[dst + 2] = image.pixels[src + 2];
    }
  }
  return out;
}

export function encodeP6(width: number, height: number, rgb: Uint8Array): Buffer {
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(rgb)]);
}
