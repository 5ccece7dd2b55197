"""Rule-driven transliteration of Latin-spelled and Pinyin words into Burmese script."""

__version__ = "0.1.0"
