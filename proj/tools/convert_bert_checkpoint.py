#!/usr/bin/env python3
# Copyright 2026 The TDP Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Converts a Hugging Face BERT model into a tdp-contextual checkpoint.

Usage:
  convert_bert_checkpoint.py bert-base-uncased contextual.json

The source may be a model name or a local directory. Requires torch and
transformers.
"""

import argparse
import json
import sys


def _matrix(tensor, transpose=False):
  t = tensor.detach().double()
  if t.dim() == 1:
    t = t.unsqueeze(1)
  if transpose:
    t = t.t()
  return {"rows": t.shape[0], "cols": t.shape[1], "data": t.reshape(-1).tolist()}


def _check_supported(config):
  problems = []
  if config.hidden_act != "gelu":
    problems.append(f"activation {config.hidden_act!r} (need 'gelu')")
  if config.type_vocab_size != 2:
    problems.append(f"type_vocab_size {config.type_vocab_size} (need 2)")
  if getattr(config, "position_embedding_type", "absolute") != "absolute":
    problems.append("non-absolute position embeddings")
  if abs(config.layer_norm_eps - 1e-12) > 1e-15:
    problems.append(f"layer_norm_eps {config.layer_norm_eps} (need 1e-12)")
  if problems:
    raise ValueError("unsupported model: " + "; ".join(problems))


def convert(model, vocab, lowercase):
  """Returns the checkpoint dict for a transformers BertModel."""
  config = model.config
  _check_supported(config)
  if len(vocab) != config.vocab_size:
    raise ValueError(f"vocabulary has {len(vocab)} tokens, model expects {config.vocab_size}")
  emb = model.embeddings
  params = {
      "embeddings/word": _matrix(emb.word_embeddings.weight, transpose=True),
      "embeddings/position": _matrix(emb.position_embeddings.weight, transpose=True),
      "embeddings/token_type": _matrix(emb.token_type_embeddings.weight, transpose=True),
      "embeddings/norm/gamma": _matrix(emb.LayerNorm.weight),
      "embeddings/norm/beta": _matrix(emb.LayerNorm.bias),
  }

  def linear(prefix, layer):
    params[prefix + "/w"] = _matrix(layer.weight)
    params[prefix + "/b"] = _matrix(layer.bias)

  def norm(prefix, layer):
    params[prefix + "/gamma"] = _matrix(layer.weight)
    params[prefix + "/beta"] = _matrix(layer.bias)

  for i, layer in enumerate(model.encoder.layer):
    p = f"layer_{i}"
    linear(p + "/attention/query", layer.attention.self.query)
    linear(p + "/attention/key", layer.attention.self.key)
    linear(p + "/attention/value", layer.attention.self.value)
    linear(p + "/attention/output", layer.attention.output.dense)
    norm(p + "/attention/norm", layer.attention.output.LayerNorm)
    linear(p + "/ffn/in", layer.intermediate.dense)
    linear(p + "/ffn/out", layer.output.dense)
    norm(p + "/ffn/norm", layer.output.LayerNorm)

  return {
      "format": "tdp-contextual",
      "config": {
          "hidden": config.hidden_size,
          "layers": config.num_hidden_layers,
          "heads": config.num_attention_heads,
          "ffn": config.intermediate_size,
          "max_positions": config.max_position_embeddings,
          "lowercase": bool(lowercase),
      },
      "vocab": list(vocab),
      "parameters": params,
  }


def main(argv=None):
  parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
  parser.add_argument("source", help="model name or directory")
  parser.add_argument("output", help="checkpoint file to write")
  args = parser.parse_args(argv)

  from transformers import BertModel, BertTokenizer  # pylint: disable=import-outside-toplevel

  tokenizer = BertTokenizer.from_pretrained(args.source)
  model = BertModel.from_pretrained(args.source)
  vocab = [token for token, _ in sorted(tokenizer.vocab.items(), key=lambda kv: kv[1])]
  checkpoint = convert(model, vocab, tokenizer.do_lower_case)
  with open(args.output, "w", encoding="utf-8") as f:
    json.dump(checkpoint, f)
    f.write("\n")
  print(f"wrote {args.output}: {len(vocab)} tokens, "
        f"{checkpoint['config']['layers']} layers", file=sys.stderr)


if __name__ == "__main__":
  main()
