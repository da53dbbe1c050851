// Lightweight text classifier backing the prediction and embedding exports.
//
// A checkpoint is a JSON file holding a hashed-vocabulary embedding table and
// a linear head. Token vectors are embedding rows selected by token hash;
// the classifier mean-pools them and applies the head. Checkpoints are
// user-supplied files; `makeCheckpoint` builds one deterministically from a
// seed for tests and local experiments. Nothing is ever downloaded.

import { readFileSync, writeFileSync } from 'fs'
import { surfaceTokens } from './tokenize.js'

export interface Checkpoint {
  model_id: string
  dim: number
  buckets: number
  label_space: string[]
  embed: number[][]
  head: number[][]
  bias: number[]
}

/** Deterministic 32-bit FNV-1a hash. */
export function hashToken(token: string): number {
  let hash = 0x811c9dc5
  for (let i = 0; i < token.length; i++) {
    hash ^= token.charCodeAt(i)
    hash = Math.imul(hash, 0x01000193)
  }
  return hash >>> 0
}

/** mulberry32 PRNG; deterministic across platforms. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) >>> 0
    let t = state
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

export function makeCheckpoint(
  modelId: string,
  labelSpace: string[],
  dim = 16,
  buckets = 512,
  seed = 7,
): Checkpoint {
  const rand = mulberry32(seed)
  const gauss = () => {
    // Box-Muller from two uniforms.
    const u = Math.max(rand(), 1e-12)
    const v = rand()
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v)
  }
  const embed = Array.from({ length: buckets }, () =>
    Array.from({ length: dim }, () => gauss() * 0.5),
  )
  const head = Array.from({ length: dim }, () =>
    Array.from({ length: labelSpace.length }, () => gauss() * 0.5),
  )
  const bias = Array.from({ length: labelSpace.length }, () => gauss() * 0.1)
  return { model_id: modelId, dim, buckets, label_space: labelSpace, embed, head, bias }
}

export function saveCheckpoint(path: string, checkpoint: Checkpoint): void {
  writeFileSync(path, JSON.stringify(checkpoint), 'utf-8')
}

export function loadCheckpoint(path: string): Checkpoint {
  const ckpt = JSON.parse(readFileSync(path, 'utf-8')) as Checkpoint
  if (!ckpt.model_id || !Array.isArray(ckpt.label_space) || ckpt.label_space.length < 2) {
    throw new Error(`${path}: checkpoint missing model_id or label_space`)
  }
  if (ckpt.embed.length !== ckpt.buckets || ckpt.embed[0].length !== ckpt.dim) {
    throw new Error(`${path}: embedding table shape mismatch`)
  }
  if (ckpt.head.length !== ckpt.dim || ckpt.bias.length !== ckpt.label_space.length) {
    throw new Error(`${path}: classifier head shape mismatch`)
  }
  return ckpt
}

/** Last-layer token vectors for a text: one embedding row per surface token. */
export function tokenVectors(ckpt: Checkpoint, text: string): number[][] {
  const tokens = surfaceTokens(text.toLowerCase())
  if (tokens.length === 0) {
    return [ckpt.embed[0].slice()]
  }
  return tokens.map(t => ckpt.embed[hashToken(t.text) % ckpt.buckets].slice())
}

export function meanPool(matrix: number[][]): number[] {
  const dim = matrix[0].length
  const out = new Array<number>(dim).fill(0)
  for (const row of matrix) {
    for (let j = 0; j < dim; j++) out[j] += row[j]
  }
  for (let j = 0; j < dim; j++) out[j] /= matrix.length
  return out
}

function softmax(logits: number[]): number[] {
  const top = Math.max(...logits)
  const exps = logits.map(z => Math.exp(z - top))
  const total = exps.reduce((a, b) => a + b, 0)
  return exps.map(e => e / total)
}

export interface Prediction {
  probs: number[]
  predicted: string
}

export function predict(ckpt: Checkpoint, text: string): Prediction {
  const pooled = meanPool(tokenVectors(ckpt, text))
  const logits = ckpt.bias.slice()
  for (let j = 0; j < logits.length; j++) {
    for (let d = 0; d < ckpt.dim; d++) logits[j] += pooled[d] * ckpt.head[d][j]
  }
  const probs = softmax(logits)
  let best = 0
  for (let j = 1; j < probs.length; j++) {
    if (probs[j] > probs[best]) best = j
  }
  return { probs, predicted: ckpt.label_space[best] }
}
