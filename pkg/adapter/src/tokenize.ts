// Surface tokenization: decimal numbers, word runs, and single punctuation
// marks, with exact character offsets. The core's leaf alignment is
// character-based, so multi-character numeric tokens like "1.3" stay whole.

export interface Token {
  text: string
  start: number
  end: number
}

const TOKEN_RE = /\p{N}+(?:[.,]\p{N}+)+|[\p{L}\p{N}_]+|[^\p{L}\p{N}_\s]/gu

export function surfaceTokens(text: string): Token[] {
  const tokens: Token[] = []
  for (const match of text.matchAll(TOKEN_RE)) {
    tokens.push({
      text: match[0],
      start: match.index ?? 0,
      end: (match.index ?? 0) + match[0].length,
    })
  }
  return tokens
}
