#!/usr/bin/env node
// suffacts-adapter: export parses, predictions, or embeddings in the core's
// wire formats.
//
//   suffacts-adapter parses --config cfg.json --in instances.jsonl --out parses.jsonl
//   suffacts-adapter preds  --config cfg.json --in input.jsonl --out preds.jsonl \
//       [--model model_a] [--instances instances.jsonl]
//   suffacts-adapter embs   --config cfg.json --in input.jsonl --out embs.jsonl \
//       [--model model_a] [--instances instances.jsonl]
//   suffacts-adapter make-checkpoint --model model_a --dataset fever \
//       --out ckpt.json [--dim 16] [--buckets 512] [--seed 7]
//
// Prediction/embedding inputs may be instance, candidate, or group files;
// candidate files need --instances to recover the claims.

import { loadConfig, requireCheckpoint } from './config.js'
import { exportEmbeddings, exportParses, exportPredictions } from './export.js'
import { makeCheckpoint, saveCheckpoint } from './model.js'
import { LABEL_SPACES } from './types.js'

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i]
    const value = argv[i + 1]
    if (!key.startsWith('--') || value === undefined) {
      throw new Error(`bad argument ${key}`)
    }
    flags.set(key.slice(2), value)
  }
  return flags
}

function need(flags: Map<string, string>, name: string): string {
  const value = flags.get(name)
  if (value === undefined) throw new Error(`missing --${name}`)
  return value
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv
  try {
    if (command === 'parses') {
      const flags = parseFlags(rest)
      loadConfig(need(flags, 'config'))
      const count = exportParses(need(flags, 'in'), need(flags, 'out'))
      console.log(JSON.stringify({ written: count }))
      return 0
    }
    if (command === 'preds' || command === 'embs') {
      const flags = parseFlags(rest)
      const config = loadConfig(need(flags, 'config'))
      const ref = requireCheckpoint(config, flags.get('model'))
      const exporter = command === 'preds' ? exportPredictions : exportEmbeddings
      const count = exporter(
        ref.path,
        need(flags, 'in'),
        need(flags, 'out'),
        flags.get('instances'),
      )
      console.log(JSON.stringify({ written: count, model_id: ref.model_id }))
      return 0
    }
    if (command === 'make-checkpoint') {
      const flags = parseFlags(rest)
      const dataset = need(flags, 'dataset')
      const labels = LABEL_SPACES[dataset]
      if (!labels) throw new Error(`unknown dataset ${dataset}`)
      const ckpt = makeCheckpoint(
        need(flags, 'model'),
        labels,
        Number(flags.get('dim') ?? 16),
        Number(flags.get('buckets') ?? 512),
        Number(flags.get('seed') ?? 7),
      )
      saveCheckpoint(need(flags, 'out'), ckpt)
      console.log(JSON.stringify({ written: 1, model_id: ckpt.model_id }))
      return 0
    }
    console.error('usage: suffacts-adapter <parses|preds|embs|make-checkpoint> --config cfg.json ...')
    return 64
  } catch (err) {
    console.error(`suffacts-adapter: ${(err as Error).message}`)
    return 1
  }
}

import { fileURLToPath } from 'url'

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)))
}
