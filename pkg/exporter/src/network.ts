/**
 * A minimal feedforward classifier with named layers.
 *
 * Just enough training loop to make per-epoch activation dumps meaningful:
 * sigmoid hidden layers, softmax cross-entropy output, plain SGD.
 */

export class Rng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  /** xorshift32; deterministic across platforms */
  next(): number {
    let x = this.state;
    x ^= x << 13;
    x >>>= 0;
    x ^= x >> 17;
    x ^= x << 5;
    x >>>= 0;
    this.state = x;
    return x / 4294967296;
  }

  normal(): number {
    // Box-Muller from two uniforms
    const u = Math.max(this.next(), 1e-12);
    const v = this.next();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }
}

function sigmoid(x: number): number {
  return 1 / (1 + Math.exp(-x));
}

export class Linear {
  weights: number[][]; // fanIn x fanOut
  biases: number[];

  constructor(fanIn: number, fanOut: number, rng: Rng) {
    const scale = 1 / Math.sqrt(fanIn);
    this.weights = [];
    for (let i = 0; i < fanIn; i++) {
      const row: number[] = [];
      for (let j = 0; j < fanOut; j++) {
        row.push(rng.normal() * scale);
      }
      this.weights.push(row);
    }
    this.biases = new Array(fanOut).fill(0);
  }

  forward(x: number[]): number[] {
    const out = this.biases.slice();
    for (let i = 0; i < x.length; i++) {
      const row = this.weights[i];
      for (let j = 0; j < out.length; j++) {
        out[j] += x[i] * row[j];
      }
    }
    return out;
  }
}

export interface Sample {
  input: number[];
  label: number;
}

/**
 * Fully connected network; hidden activations are exposed by layer name
 * ("input", "h1", "h2", ...) so the exporter can capture them.
 */
export class FeedForward {
  layers: Linear[];
  hiddenNames: string[];

  constructor(widths: number[], seed: number) {
    if (widths.length < 2) {
      throw new Error('need at least input and output widths');
    }
    const rng = new Rng(seed);
    this.layers = [];
    for (let l = 0; l + 1 < widths.length; l++) {
      this.layers.push(new Linear(widths[l], widths[l + 1], rng));
    }
    this.hiddenNames = [];
    for (let l = 0; l + 2 < widths.length; l++) {
      this.hiddenNames.push(`h${l + 1}`);
    }
  }

  /** All capturable activations, keyed by layer name. */
  activations(input: number[]): Map<string, number[]> {
    const captured = new Map<string, number[]>();
    captured.set('input', input.slice());
    let current = input;
    for (let l = 0; l + 1 < this.layers.length; l++) {
      current = this.layers[l].forward(current).map(sigmoid);
      captured.set(this.hiddenNames[l], current.slice());
    }
    return captured;
  }

  private probabilities(input: number[]): { hidden: number[][]; probs: number[] } {
    const hidden: number[][] = [];
    let current = input;
    for (let l = 0; l + 1 < this.layers.length; l++) {
      current = this.layers[l].forward(current).map(sigmoid);
      hidden.push(current);
    }
    const logits = this.layers[this.layers.length - 1].forward(current);
    const top = Math.max(...logits);
    const exps = logits.map((z) => Math.exp(z - top));
    const total = exps.reduce((s, e) => s + e, 0);
    return { hidden, probs: exps.map((e) => e / total) };
  }

  predict(input: number[]): number {
    const { probs } = this.probabilities(input);
    let best = 0;
    for (let k = 1; k < probs.length; k++) {
      if (probs[k] > probs[best]) best = k;
    }
    return best;
  }

  accuracy(samples: Sample[]): number {
    let correct = 0;
    for (const s of samples) {
      if (this.predict(s.input) === s.label) correct++;
    }
    return correct / samples.length;
  }

  /** One SGD step on a single sample (backprop through every layer). */
  trainSample(sample: Sample, learningRate: number): void {
    const { hidden, probs } = this.probabilities(sample.input);
    const inputs = [sample.input, ...hidden];
    // delta at the output: softmax cross-entropy
    let delta = probs.map((p, k) => p - (k === sample.label ? 1 : 0));
    for (let l = this.layers.length - 1; l >= 0; l--) {
      const layer = this.layers[l];
      const layerIn = inputs[l];
      const prevDelta: number[] = new Array(layerIn.length).fill(0);
      for (let i = 0; i < layerIn.length; i++) {
        const row = layer.weights[i];
        for (let j = 0; j < delta.length; j++) {
          prevDelta[i] += row[j] * delta[j];
          row[j] -= learningRate * layerIn[i] * delta[j];
        }
      }
      for (let j = 0; j < delta.length; j++) {
        layer.biases[j] -= learningRate * delta[j];
      }
      if (l > 0) {
        // through the sigmoid of the previous hidden layer
        const activated = hidden[l - 1];
        delta = prevDelta.map((d, i) => d * activated[i] * (1 - activated[i]));
      }
    }
  }

  trainEpoch(samples: Sample[], learningRate: number, rng: Rng): void {
    const order = samples.map((_, k) => k);
    for (let k = order.length - 1; k > 0; k--) {
      const swap = Math.floor(rng.next() * (k + 1));
      [order[k], order[swap]] = [order[swap], order[k]];
    }
    for (const k of order) {
      this.trainSample(samples[k], learningRate);
    }
  }
}

/** Two noisy blobs, one per class; deterministic per seed. */
export function makeBlobs(perClass: number, gap: number, seed: number): Sample[] {
  const rng = new Rng(seed);
  const samples: Sample[] = [];
  for (let k = 0; k < perClass; k++) {
    samples.push({ input: [rng.normal() - gap / 2, rng.normal()], label: 0 });
    samples.push({ input: [rng.normal() + gap / 2, rng.normal()], label: 1 });
  }
  return samples;
}
