/**
 * The same fully specified generator stack the engine documents:
 * splitmix64 seeding, xoshiro256** stream, bounded draws as next % n,
 * FNV-1a 64 for string-derived seeds.  Model weights come from here, so
 * a given model name always materializes the same parameters.
 */

const MASK = (1n << 64n) - 1n;

export function fnv1a64(data: string): bigint {
  let h = 0xcbf29ce484222325n;
  for (const byte of Buffer.from(data, "utf-8")) {
    h = ((h ^ BigInt(byte)) * 0x100000001b3n) & MASK;
  }
  return h;
}

function rotl(x: bigint, k: bigint): bigint {
  return ((x << k) | (x >> (64n - k))) & MASK;
}

export class Xoshiro256 {
  private s: bigint[];

  constructor(seed: bigint) {
    let state = seed & MASK;
    this.s = [];
    for (let i = 0; i < 4; i++) {
      state = (state + 0x9e3779b97f4a7c15n) & MASK;
      let z = state;
      z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
      z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
      this.s.push(z ^ (z >> 31n));
    }
  }

  nextU64(): bigint {
    const s = this.s;
    const result = (rotl((s[1] * 5n) & MASK, 7n) * 9n) & MASK;
    const t = (s[1] << 17n) & MASK;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45n);
    return result;
  }

  /** Uniform double in [0, 1): top 53 bits over 2^53. */
  nextDouble(): number {
    return Number(this.nextU64() >> 11n) * 2 ** -53;
  }

  /** Uniform in [-scale, scale). */
  nextSymmetric(scale: number): number {
    return (this.nextDouble() * 2 - 1) * scale;
  }
}
