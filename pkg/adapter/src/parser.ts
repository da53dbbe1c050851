// Deterministic shallow constituency bracketing over tagged tokens.
//
// The shape is flat but well-formed: a root S whose children are the subject
// noun phrase, a verb phrase holding the verb cluster and its object, and
// then any prepositional phrases, subordinate clauses, and leftover leaves in
// surface order. Leaves are exactly the surface tokens, in order, so the
// core's span alignment always succeeds.

import { surfaceTokens } from './tokenize.js'
import { tagTokens } from './postag.js'

export interface TreeNode {
  label: string
  children?: TreeNode[]
  token?: string
}

const PTB_ESCAPE: Record<string, string> = {
  '(': '-LRB-',
  ')': '-RRB-',
  '[': '-LSB-',
  ']': '-RSB-',
  '{': '-LCB-',
  '}': '-RCB-',
}

const NOMINAL = new Set(['NN', 'NNS', 'NNP', 'NNPS', 'CD', 'PRP'])
const NP_INTERNAL = new Set(['DT', 'PRP$', 'CD', 'JJ', 'JJR', 'JJS', 'NN', 'NNS', 'NNP', 'NNPS'])
const VERB = new Set(['VB', 'VBZ', 'VBP', 'VBD', 'VBN', 'VBG', 'MD'])

interface Tagged {
  token: string
  tag: string
}

function leaf(t: Tagged): TreeNode {
  return { label: t.tag, token: t.token }
}

function phrase(label: string, children: TreeNode[]): TreeNode {
  return { label, children }
}

/** Consume a noun-phrase run starting at `i`; returns [node, next] or null. */
function readNp(tagged: Tagged[], i: number): [TreeNode, number] | null {
  if (i >= tagged.length) return null
  if (tagged[i].tag === 'PRP') {
    return [phrase('NP', [leaf(tagged[i])]), i + 1]
  }
  let j = i
  while (j < tagged.length && NP_INTERNAL.has(tagged[j].tag)) j += 1
  // Trim back to the last nominal so a trailing determiner/adjective is not
  // swallowed into the phrase.
  let last = j - 1
  while (last >= i && !NOMINAL.has(tagged[last].tag)) last -= 1
  if (last < i) return null
  const kids = tagged.slice(i, last + 1).map(leaf)
  return [phrase('NP', kids), last + 1]
}

/** Chunk a token range into NP / PP / SBAR / ADVP / leaf units. */
function chunkUnits(tagged: Tagged[], start: number, end: number): TreeNode[] {
  const units: TreeNode[] = []
  let i = start
  while (i < end) {
    const tag = tagged[i].tag
    if (tag === 'WDT' || tag === 'WP') {
      // The clause runs to the next comma, or to the end minus any trailing
      // sentence punctuation, which belongs to the outer clause.
      let stop = end
      for (let j = i + 1; j < end; j++) {
        if (tagged[j].tag === ',') {
          stop = j
          break
        }
      }
      if (stop === end) {
        while (stop > i + 1 && ['.', '!', '?'].includes(tagged[stop - 1].tag)) stop -= 1
      }
      const inner = assembleClause(tagged, i + 1, stop)
      units.push(phrase('SBAR', [phrase('WHNP', [leaf(tagged[i])]), inner]))
      i = stop
      continue
    }
    if (tag === 'IN' || tag === 'TO') {
      const np = readNp(tagged, i + 1)
      if (np) {
        units.push(phrase('PP', [leaf(tagged[i]), np[0]]))
        i = np[1]
        continue
      }
      units.push(leaf(tagged[i]))
      i += 1
      continue
    }
    if (tag === 'RB' || tag === 'RBR' || tag === 'RBS') {
      let j = i
      while (j < end && (tagged[j].tag === 'RB' || tagged[j].tag === 'RBR' || tagged[j].tag === 'RBS')) j += 1
      units.push(phrase('ADVP', tagged.slice(i, j).map(leaf)))
      i = j
      continue
    }
    if (NP_INTERNAL.has(tag) || tag === 'PRP') {
      const np = readNp(tagged, i)
      if (np) {
        units.push(np[0])
        i = np[1]
        continue
      }
    }
    units.push(leaf(tagged[i]))
    i += 1
  }
  return units
}

/**
 * Assemble a clause: subject material, then a VP over the verb cluster and
 * its object, then the remaining units as clause children.
 */
function assembleClause(tagged: Tagged[], start: number, end: number): TreeNode {
  const units = chunkUnits(tagged, start, end)
  const children: TreeNode[] = []
  let i = 0

  const isVerbUnit = (u: TreeNode) =>
    (u.token !== undefined && VERB.has(u.label)) || u.label === 'ADVP'

  // Subject side: everything before the first finite verb leaf.
  while (i < units.length && !(units[i].token !== undefined && VERB.has(units[i].label))) {
    children.push(units[i])
    i += 1
  }

  if (i < units.length) {
    const vp: TreeNode[] = []
    while (i < units.length && isVerbUnit(units[i])) {
      vp.push(units[i])
      i += 1
    }
    // One immediately following noun phrase is the object.
    if (i < units.length && units[i].label === 'NP') {
      vp.push(units[i])
      i += 1
    }
    children.push(phrase('VP', vp))
  }

  while (i < units.length) {
    children.push(units[i])
    i += 1
  }
  return phrase('S', children.length ? children : units)
}

export function parseSentence(text: string): TreeNode {
  const tokens = surfaceTokens(text)
  if (tokens.length === 0) {
    throw new Error('cannot parse an empty sentence')
  }
  const tags = tagTokens(tokens.map(t => t.text))
  const tagged: Tagged[] = tokens.map((t, k) => ({ token: t.text, tag: tags[k] }))
  return assembleClause(tagged, 0, tagged.length)
}

export function toBracketed(node: TreeNode): string {
  if (node.token !== undefined) {
    const token = PTB_ESCAPE[node.token] ?? node.token
    const label = PTB_ESCAPE[node.label] ?? node.label
    return `(${label} ${token})`
  }
  const inner = (node.children ?? []).map(toBracketed).join(' ')
  return `(${node.label} ${inner})`
}

export function leafTags(node: TreeNode): string[] {
  if (node.token !== undefined) return [node.label]
  return (node.children ?? []).flatMap(leafTags)
}

export function leafTokens(node: TreeNode): string[] {
  if (node.token !== undefined) return [node.token]
  return (node.children ?? []).flatMap(leafTokens)
}
