"""patchoracle: executable patch oracles inferred from pull-request intent.

The pipeline fetches a PR, extracts the modified function and its context,
asks a pluggable LLM backend for a patch oracle (runtime assertions inside a
pre/post comparison program), executes it in a sandbox, and iterates
enhancement, self-review, and repair under call budgets until it can report
whether the change is consistent with its stated intent.
"""

__version__ = "0.1.0"
