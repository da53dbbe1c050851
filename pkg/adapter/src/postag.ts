// Rule-based PoS tagging: closed-class lexicons plus suffix and context
// heuristics. Coarse but deterministic; the downstream consumer only needs
// consistent tags for chunking.

const DETERMINERS = new Set(['the', 'a', 'an', 'this', 'these', 'those', 'each', 'every', 'no'])
const PREPOSITIONS = new Set([
  'in', 'on', 'at', 'by', 'from', 'of', 'with', 'as', 'for', 'near', 'into',
  'over', 'under', 'between', 'during', 'through', 'after', 'before', 'since',
  'about', 'against', 'within',
])
const CONJUNCTIONS = new Set(['and', 'or', 'but', 'nor'])
const PRONOUNS = new Set(['he', 'she', 'it', 'they', 'we', 'i', 'you', 'him', 'them', 'us', 'her'])
const POSSESSIVES = new Set(['his', 'its', 'their', 'our', 'my', 'your'])
const WH_WORDS = new Set(['which', 'who', 'whom', 'whose'])
const AUX: Record<string, string> = {
  is: 'VBZ', are: 'VBP', was: 'VBD', were: 'VBD', be: 'VB', been: 'VBN',
  being: 'VBG', has: 'VBZ', have: 'VBP', had: 'VBD', does: 'VBZ', do: 'VBP',
  did: 'VBD', will: 'MD', would: 'MD', can: 'MD', could: 'MD', may: 'MD',
  must: 'MD', should: 'MD',
}
const MONTHS = new Set([
  'january', 'february', 'march', 'april', 'may', 'june', 'july', 'august',
  'september', 'october', 'november', 'december', 'jan', 'feb', 'mar', 'apr',
  'jun', 'jul', 'aug', 'sep', 'sept', 'oct', 'nov', 'dec',
])
const ADVERB_EXCEPTIONS = new Set(['only', 'early'])
const ADJ_SUFFIXES = ['ous', 'ful', 'ive', 'ible', 'able', 'ic', 'ish', 'less', 'ant', 'ent']

const VERB_TAGS = new Set(['VB', 'VBZ', 'VBP', 'VBD', 'VBN', 'VBG', 'MD', 'RB'])

// Bracket punctuation carries its PTB escape as the tag, matching the token
// escaping in the bracketed tree text.
const BRACKET_TAGS: Record<string, string> = {
  '(': '-LRB-',
  ')': '-RRB-',
  '[': '-LSB-',
  ']': '-RSB-',
  '{': '-LCB-',
  '}': '-RCB-',
}

function isPunct(token: string): boolean {
  return /^[^\p{L}\p{N}_]+$/u.test(token)
}

function isCapitalized(token: string): boolean {
  return /^[A-Z]/.test(token)
}

export function tagTokens(tokens: string[]): string[] {
  const tags: string[] = []
  for (let i = 0; i < tokens.length; i++) {
    const token = tokens[i]
    const lower = token.toLowerCase()
    const prev = i > 0 ? tags[i - 1] : ''

    if (isPunct(token)) {
      tags.push(BRACKET_TAGS[token] ?? (token.length === 1 ? token : ','))
      continue
    }
    if (/^\d+(st|nd|rd|th)$/i.test(token) || /^\d+([.,]\d+)*$/.test(token)) {
      tags.push('CD')
      continue
    }
    if (MONTHS.has(lower) && isCapitalized(token)) {
      tags.push('NNP')
      continue
    }
    if (lower === 'not' || lower === "n't") {
      tags.push('RB')
      continue
    }
    if (lower === 'to') {
      tags.push('TO')
      continue
    }
    if (lower === 'that') {
      // Relative "that" introduces a clause; determiner "that" precedes a noun.
      const next = tokens[i + 1]?.toLowerCase() ?? ''
      tags.push(next in AUX || WH_WORDS.has(next) ? 'WDT' : 'DT')
      continue
    }
    if (WH_WORDS.has(lower)) {
      tags.push(lower === 'which' || lower === 'whose' ? 'WDT' : 'WP')
      continue
    }
    if (DETERMINERS.has(lower)) {
      tags.push('DT')
      continue
    }
    if (PREPOSITIONS.has(lower)) {
      tags.push('IN')
      continue
    }
    if (CONJUNCTIONS.has(lower)) {
      tags.push('CC')
      continue
    }
    if (POSSESSIVES.has(lower)) {
      tags.push('PRP$')
      continue
    }
    if (PRONOUNS.has(lower)) {
      tags.push('PRP')
      continue
    }
    if (lower in AUX) {
      tags.push(AUX[lower])
      continue
    }
    if (lower.endsWith('ly') && !ADVERB_EXCEPTIONS.has(lower)) {
      tags.push('RB')
      continue
    }
    if (i > 0 && isCapitalized(token)) {
      tags.push('NNP')
      continue
    }
    if (lower.endsWith('ing') && lower.length > 4) {
      tags.push('VBG')
      continue
    }
    if (lower.endsWith('ed') && lower.length > 3) {
      tags.push(VERB_TAGS.has(prev) ? 'VBN' : 'VBD')
      continue
    }
    if (ADJ_SUFFIXES.some(suffix => lower.endsWith(suffix) && lower.length > suffix.length + 2)) {
      tags.push('JJ')
      continue
    }
    if (lower.endsWith('s') && !lower.endsWith('ss') && lower.length > 3) {
      tags.push('NNS')
      continue
    }
    tags.push('NN')
  }
  return tags
}
