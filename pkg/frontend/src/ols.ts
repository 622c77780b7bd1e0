/**
 * OLS of log(risk) against log(n) — deliberately the same definition the
 * backend's `rates` command uses, so slope annotations agree with its report:
 * non-positive risks are dropped (with a count), three usable points are
 * required, and a constant series has r^2 = 1.
 */

export interface RateFit {
  slope: number;
  intercept: number;
  rSquared: number;
  points: number;
  dropped: number;
}

export class RegressionError extends Error {}

export function fitRate(points: Array<[number, number]>): RateFit {
  const usable = points.filter(([, risk]) => risk > 0);
  const dropped = points.length - usable.length;
  if (usable.length < 3) {
    throw new RegressionError(
      `regression needs >= 3 positive-risk points, got ${usable.length}`,
    );
  }
  const x = usable.map(([n]) => Math.log(n));
  const y = usable.map(([, risk]) => Math.log(risk));
  const xMean = x.reduce((a, b) => a + b, 0) / x.length;
  const yMean = y.reduce((a, b) => a + b, 0) / y.length;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < x.length; i++) {
    sxx += (x[i] - xMean) * (x[i] - xMean);
    sxy += (x[i] - xMean) * (y[i] - yMean);
  }
  if (sxx === 0) {
    throw new RegressionError("regression needs distinct sample sizes");
  }
  const slope = sxy / sxx;
  const intercept = yMean - slope * xMean;
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < x.length; i++) {
    const r = y[i] - (intercept + slope * x[i]);
    ssRes += r * r;
    ssTot += (y[i] - yMean) * (y[i] - yMean);
  }
  const rSquared = ssTot === 0 ? 1 : 1 - ssRes / ssTot;
  return { slope, intercept, rSquared, points: usable.length, dropped };
}
