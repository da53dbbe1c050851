import { readFileSync } from 'fs'

export interface CheckpointRef {
  model_id: string
  path: string
}

export interface AdapterConfig {
  parser_model: string
  checkpoints: CheckpointRef[]
  batch_size: number
  device: string
}

export const BUILTIN_PARSER = 'chunker-v1'

export function loadConfig(path: string): AdapterConfig {
  const raw = JSON.parse(readFileSync(path, 'utf-8'))
  const config: AdapterConfig = {
    parser_model: raw.parser_model ?? BUILTIN_PARSER,
    checkpoints: raw.checkpoints ?? [],
    batch_size: raw.batch_size ?? 8,
    device: raw.device ?? 'cpu',
  }
  if (config.parser_model !== BUILTIN_PARSER) {
    throw new Error(`unknown parser_model ${config.parser_model}; only ${BUILTIN_PARSER} is available`)
  }
  for (const ref of config.checkpoints) {
    if (!ref.model_id || !ref.path) {
      throw new Error('each checkpoint needs model_id and path')
    }
  }
  return config
}

export function requireCheckpoint(config: AdapterConfig, modelId?: string): CheckpointRef {
  if (config.checkpoints.length === 0) {
    throw new Error('prediction and embedding export need at least one checkpoint')
  }
  if (!modelId) return config.checkpoints[0]
  const found = config.checkpoints.find(c => c.model_id === modelId)
  if (!found) {
    throw new Error(`no checkpoint for model ${modelId}`)
  }
  return found
}
