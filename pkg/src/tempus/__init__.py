"""Corpus analysis of temporal language.

Pipeline: ingest raw page text into a cleaned corpus, mark occurrences of a
temporal-adverb lexicon and of general time expressions, build contextual
sentence windows around each occurrence, score them with a three-polarity
aspect-sentiment backend, and compare the two groups statistically.  A
separate path measures narrative flow (sequentiality) over stories built
from the corpus, and a scorer for structured temporal-experience interview
responses rounds out the toolkit.
"""

__version__ = "0.1.0"
