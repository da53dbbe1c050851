import { readFileSync, writeFileSync } from 'fs'

export function readJsonl<T>(path: string): T[] {
  const out: T[] = []
  const text = readFileSync(path, 'utf-8')
  let lineNo = 0
  for (const line of text.split('\n')) {
    lineNo += 1
    if (!line.trim()) continue
    try {
      out.push(JSON.parse(line) as T)
    } catch (err) {
      throw new Error(`${path}:${lineNo}: malformed JSON (${(err as Error).message})`)
    }
  }
  return out
}

export function writeJsonl(path: string, rows: unknown[]): number {
  const text = rows.map(row => JSON.stringify(row)).join('\n')
  writeFileSync(path, rows.length ? text + '\n' : '', 'utf-8')
  return rows.length
}
