/**
 * Exact rationals on bigint. The server speaks rationals as strings like
 * "190/3" or "-7"; every comparison the UI makes (envy matrix signs, budget
 * badges, sum checks) must be exact, so floats are never involved.
 */

export class Rational {
  readonly num: bigint;
  readonly den: bigint;

  constructor(num: bigint, den: bigint = 1n) {
    if (den === 0n) throw new Error('zero denominator');
    if (den < 0n) {
      num = -num;
      den = -den;
    }
    const g = gcd(num < 0n ? -num : num, den);
    this.num = g === 0n ? 0n : num / g;
    this.den = g === 0n ? 1n : den / g;
  }

  static parse(raw: string | number): Rational {
    if (typeof raw === 'number') {
      if (!Number.isInteger(raw)) throw new Error(`refusing non-integer number ${raw}`);
      return new Rational(BigInt(raw));
    }
    const text = raw.trim();
    let m = /^(-?\d+)\/(\d+)$/.exec(text);
    if (m) return new Rational(BigInt(m[1]), BigInt(m[2]));
    m = /^(-?\d+)$/.exec(text);
    if (m) return new Rational(BigInt(m[1]));
    m = /^(-?)(\d+)\.(\d+)$/.exec(text);
    if (m) {
      const sign = m[1] === '-' ? -1n : 1n;
      const scale = 10n ** BigInt(m[3].length);
      return new Rational(sign * (BigInt(m[2]) * scale + BigInt(m[3])), scale);
    }
    throw new Error(`cannot parse rational from ${JSON.stringify(raw)}`);
  }

  add(o: Rational): Rational {
    return new Rational(this.num * o.den + o.num * this.den, this.den * o.den);
  }

  sub(o: Rational): Rational {
    return new Rational(this.num * o.den - o.num * this.den, this.den * o.den);
  }

  mul(o: Rational): Rational {
    return new Rational(this.num * o.num, this.den * o.den);
  }

  neg(): Rational {
    return new Rational(-this.num, this.den);
  }

  cmp(o: Rational): -1 | 0 | 1 {
    const left = this.num * o.den;
    const right = o.num * this.den;
    return left < right ? -1 : left > right ? 1 : 0;
  }

  lt(o: Rational): boolean {
    return this.cmp(o) < 0;
  }

  lte(o: Rational): boolean {
    return this.cmp(o) <= 0;
  }

  gt(o: Rational): boolean {
    return this.cmp(o) > 0;
  }

  eq(o: Rational): boolean {
    return this.cmp(o) === 0;
  }

  isZero(): boolean {
    return this.num === 0n;
  }

  /** Canonical wire form: "p" or "p/q". */
  toString(): string {
    return this.den === 1n ? this.num.toString() : `${this.num}/${this.den}`;
  }

  /** Display form with a bounded decimal expansion, exact when it ends. */
  toDisplay(maxDecimals = 4): string {
    if (this.den === 1n) return this.num.toString();
    const sign = this.num < 0n ? '-' : '';
    let rest = this.num < 0n ? -this.num : this.num;
    const whole = rest / this.den;
    rest = rest % this.den;
    let digits = '';
    for (let k = 0; k < maxDecimals && rest !== 0n; k++) {
      rest *= 10n;
      digits += (rest / this.den).toString();
      rest = rest % this.den;
    }
    if (rest !== 0n) return `${this.toString()} (~${sign}${whole}.${digits})`;
    return `${sign}${whole}.${digits}`;
  }
}

function gcd(a: bigint, b: bigint): bigint {
  while (b !== 0n) {
    [a, b] = [b, a % b];
  }
  return a;
}

export const ZERO = new Rational(0n);

export function sum(values: Rational[]): Rational {
  return values.reduce((acc, v) => acc.add(v), ZERO);
}
