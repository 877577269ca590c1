"""Walkthrough: the end-to-end strategy sweep on a seeded synthetic corpus.

Generates a small heterogeneous corpus with planted facts, runs the full
chunk -> inject -> embed -> index -> evaluate pipeline for every injection
strategy, and prints the table behind the three headline effects: ranking
quality peaks at an interior ratio, thematic recall overtakes specific
recall as the ratio grows, and chunks of one document homogenize.
"""

import time

from cirbench import (
    CorpusConfig,
    EmbedderConfig,
    all_strategies,
    chunk_document,
    generate_corpus,
    run_sweep,
)

config = CorpusConfig(
    seed=42,
    doc_counts={"normative": 6, "technical": 8, "transactional": 6},
    query_count=120,
)
docs, queries = generate_corpus(config)
n_chunks = sum(len(chunk_document(d, config.chunk_token_target)) for d in docs)
print(f"corpus: {len(docs)} documents, {n_chunks} chunks, {len(queries)} queries")

started = time.perf_counter()
report = run_sweep(
    docs,
    queries,
    all_strategies(t_max=0.35),
    EmbedderConfig(dim=256, hash_seed=42),
    chunk_target=config.chunk_token_target,
)
print(f"sweep finished in {time.perf_counter() - started:.1f}s\n")

header = f"{'strategy':<10} {'mean_cir':>8} {'ndcg@10':>8} {'rec5 spec':>9} {'rec5 them':>9} {'homog':>7} {'wrong-sec':>9}"
print(header)
print("-" * len(header))
for r in report.rows:
    wrong = "    -" if r.wrong_section_share is None else f"{r.wrong_section_share:9.3f}"
    print(
        f"{r.strategy:<10} {r.mean_cir:8.4f} {r.ndcg_at_10:8.4f} "
        f"{r.recall5_specific:9.3f} {r.recall5_thematic:9.3f} {r.homogenization:7.4f} {wrong}"
    )

print()
print(f"interior peak in ndcg@10 (inverted U): {report.flags.inverted_u}")
if report.flags.curve_cross_cir is not None:
    print(f"thematic recall overtakes specific recall at mean CIR ~ {report.flags.curve_cross_cir:.3f}")
else:
    print("no recall curve crossing on this corpus")

rows = {r.strategy: r for r in report.rows}
base, over, ddai = rows["baseline"], rows["overload"], rows["ddai"]
print()
print("reading the table:")
print(f"  specific recall  {base.recall5_specific:.2f} -> {over.recall5_specific:.2f}  (baseline -> overload: local signal buried)")
print(f"  thematic recall  {base.recall5_thematic:.2f} -> {over.recall5_thematic:.2f}  (the index degrades into a document finder)")
print(f"  homogenization   {base.homogenization:.2f} -> {over.homogenization:.2f}  (intra-document vectors collapse together)")
print(f"  adaptive budget keeps specific recall at {ddai.recall5_specific:.2f} with ndcg {ddai.ndcg_at_10:.3f} (overload: {over.ndcg_at_10:.3f})")
