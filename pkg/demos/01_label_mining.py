"""
Mining labels from fault reports
================================

Each report gets the shortest run of its top TF-IDF words that covers half
of its positive TF-IDF mass. Order numbers are scrubbed before tokenizing.
"""

from brgbdt import datasets
from brgbdt.labelmine import compute_stats, mine_labels, rank_words, doc_scores
from brgbdt.textprep import RawRecord, TokenizerConfig, preprocess

records, vectors = datasets.make_text_corpus(n_docs=30, seed=0)
print(records[0]["text"])

# strip "order #A12345" and tokenize
raw = [RawRecord(r["id"], r["text"], {"order_no": r["order_no"]}) for r in records]
cfg = TokenizerConfig(stopwords=["issue"])
docs = preprocess(raw, cfg, drop_fields=("order_no",), patterns=(r"order\s*#\s*\w+",))
print(docs[0].tokens)

# words found in every report get a negative idf and never win
stats = compute_stats(docs)
for word, value in rank_words(doc_scores(docs[0], stats)):
    print(f"{word:8s} {value:+.4f}")

mined = mine_labels(docs, stats, delta=0.5)
for doc in docs[:5]:
    print(doc.id, mined.per_doc[doc.id])
print(len(mined.universe), "labels:", " ".join(mined.universe))
