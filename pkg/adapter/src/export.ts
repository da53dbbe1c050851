// The three artifact exporters. Every output line is one wire-format record
// the core toolkit reads back verbatim.

import { readJsonl, writeJsonl } from './jsonl.js'
import { loadCheckpoint, meanPool, predict, tokenVectors, Checkpoint } from './model.js'
import { leafTags, parseSentence, toBracketed } from './parser.js'
import {
  CandidateRec,
  EmbeddingRec,
  GroupRec,
  InstanceRec,
  ParseRec,
  PredictionRec,
  candidateId,
  renderEvidence,
} from './types.js'

export function exportParses(instancesPath: string, outPath: string): number {
  const instances = readJsonl<InstanceRec>(instancesPath)
  const records: ParseRec[] = []
  for (const inst of instances) {
    for (const sentence of inst.evidence) {
      try {
        const tree = parseSentence(sentence.text)
        records.push({
          id: inst.id,
          sent_index: sentence.sent_index,
          surface: sentence.text,
          tree: toBracketed(tree),
          pos: leafTags(tree),
        })
      } catch (err) {
        console.error(
          `parse failed for ${inst.id}/${sentence.sent_index}: ${(err as Error).message}; skipped`,
        )
      }
    }
  }
  return writeJsonl(outPath, records)
}

type PredictionInput =
  | { kind: 'instances'; rows: InstanceRec[] }
  | { kind: 'candidates'; rows: CandidateRec[] }
  | { kind: 'groups'; rows: GroupRec[] }

function sniffInput(path: string): PredictionInput {
  const rows = readJsonl<Record<string, unknown>>(path)
  if (rows.length === 0) return { kind: 'instances', rows: [] }
  const first = rows[0]
  if ('anchor_id' in first) return { kind: 'groups', rows: rows as unknown as GroupRec[] }
  if ('base_id' in first) return { kind: 'candidates', rows: rows as unknown as CandidateRec[] }
  if ('claim' in first && 'evidence' in first) {
    return { kind: 'instances', rows: rows as unknown as InstanceRec[] }
  }
  throw new Error(`${path}: unrecognized input schema`)
}

function claimIndex(instancesPath: string | undefined, what: string): Map<string, string> {
  if (!instancesPath) {
    throw new Error(`${what} input needs --instances to recover claims`)
  }
  const map = new Map<string, string>()
  for (const inst of readJsonl<InstanceRec>(instancesPath)) {
    map.set(inst.id, inst.claim)
  }
  return map
}

function pairText(claim: string, evidence: string): string {
  return `${claim} ${evidence}`
}

export function exportPredictions(
  checkpointPath: string,
  inPath: string,
  outPath: string,
  instancesPath?: string,
): number {
  const ckpt = loadCheckpoint(checkpointPath)
  const input = sniffInput(inPath)
  const records: PredictionRec[] = []

  const emit = (instance_id: string, text: string) => {
    const { probs, predicted } = predict(ckpt, text)
    records.push({ instance_id, model_id: ckpt.model_id, probs, predicted })
  }

  if (input.kind === 'instances') {
    for (const inst of input.rows) {
      emit(inst.id, pairText(inst.claim, renderEvidence(inst.evidence)))
    }
  } else if (input.kind === 'candidates') {
    const claims = claimIndex(instancesPath, 'candidate')
    for (const cand of input.rows) {
      const claim = claims.get(cand.base_id)
      if (claim === undefined) {
        throw new Error(`no instance with id ${cand.base_id} for candidate input`)
      }
      emit(candidateId(cand), pairText(claim, cand.evidence_reduced))
    }
  } else {
    for (const group of input.rows) {
      emit(`${group.anchor_id}::anchor`, pairText(group.anchor.claim, group.anchor.evidence))
      emit(`${group.anchor_id}::positive`, pairText(group.positive.claim, group.positive.evidence))
      group.negatives.forEach((pair, k) =>
        emit(`${group.anchor_id}::neg${k}`, pairText(pair.claim, pair.evidence)),
      )
    }
  }
  return writeJsonl(outPath, records)
}

export function exportEmbeddings(
  checkpointPath: string,
  inPath: string,
  outPath: string,
  instancesPath?: string,
): number {
  const ckpt = loadCheckpoint(checkpointPath)
  const input = sniffInput(inPath)
  const records: EmbeddingRec[] = []

  const emit = (instance_id: string, role: EmbeddingRec['role'], text: string) => {
    records.push({ instance_id, role, vectors: tokenVectors(ckpt, text) })
  }

  if (input.kind === 'instances') {
    for (const inst of input.rows) {
      emit(inst.id, 'ANCHOR', pairText(inst.claim, renderEvidence(inst.evidence)))
    }
  } else if (input.kind === 'candidates') {
    const claims = claimIndex(instancesPath, 'candidate')
    for (const cand of input.rows) {
      const claim = claims.get(cand.base_id)
      if (claim === undefined) {
        throw new Error(`no instance with id ${cand.base_id} for candidate input`)
      }
      emit(candidateId(cand), 'NEGATIVE', pairText(claim, cand.evidence_reduced))
    }
  } else {
    for (const group of input.rows) {
      emit(`${group.anchor_id}::anchor`, 'ANCHOR', pairText(group.anchor.claim, group.anchor.evidence))
      emit(
        `${group.anchor_id}::positive`,
        'POSITIVE',
        pairText(group.positive.claim, group.positive.evidence),
      )
      group.negatives.forEach((pair, k) =>
        emit(`${group.anchor_id}::neg${k}`, 'NEGATIVE', pairText(pair.claim, pair.evidence)),
      )
    }
  }
  return writeJsonl(outPath, records)
}

/** Adapter-side pooled means, for cross-checking against the core's pooling. */
export function pooledMeans(embeddingsPath: string): Map<string, number[]> {
  const out = new Map<string, number[]>()
  for (const rec of readJsonl<EmbeddingRec>(embeddingsPath)) {
    out.set(`${rec.instance_id}#${rec.role}`, meanPool(rec.vectors))
  }
  return out
}

export { Checkpoint }
