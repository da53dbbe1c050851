// Wire formats shared with the core toolkit. Field names are contractual.

export interface EvidenceSentenceRec {
  title: string
  text: string
  sent_index: number
}

export interface InstanceRec {
  id: string
  dataset: string
  claim: string
  evidence: EvidenceSentenceRec[]
  label: string
}

export interface ParseRec {
  id: string
  sent_index: number
  surface: string
  tree: string
  pos: string[]
}

export interface CandidateRec {
  base_id: string
  type: string
  removed: string
  span: [number, number]
  sent_index: number
  evidence_reduced: string
}

export interface PredictionRec {
  instance_id: string
  model_id: string
  probs: number[]
  predicted: string
}

export type EmbeddingRole = 'ANCHOR' | 'POSITIVE' | 'NEGATIVE'

export interface EmbeddingRec {
  instance_id: string
  role: EmbeddingRole
  vectors: number[][]
}

export interface TextPairRec {
  claim: string
  evidence: string
}

export interface GroupRec {
  anchor_id: string
  label: string
  anchor: TextPairRec
  positive: TextPairRec
  negatives: TextPairRec[]
  distractor: string
}

export const LABEL_SPACES: Record<string, string[]> = {
  fever: ['SUPPORTS', 'REFUTES', 'NEI'],
  vitaminc: ['SUPPORTS', 'REFUTES', 'NEI'],
  hover: ['SUPPORTING', 'NOT_SUPPORTING'],
}

/** Candidate identifier; must match the core's derivation exactly. */
export function candidateId(c: CandidateRec): string {
  return `${c.base_id}#${c.type}#${c.sent_index}#${c.span[0]}-${c.span[1]}`
}

/** Render evidence the way the core does: "[title] text" joined by spaces. */
export function renderEvidence(evidence: EvidenceSentenceRec[]): string {
  return evidence
    .map(s => (s.title ? `[${s.title}] ${s.text}` : s.text))
    .join(' ')
}
