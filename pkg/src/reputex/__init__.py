"""reputex: review-reputation mining at desk scale.

Crawls a review-listing site politely, stores praise/complaint reviews with
content-hash deduplication, and summarizes each company with Gibbs-sampled
LDA topic reports, exposed through a CLI and an HTTP service.
"""

__version__ = "0.1.0"
