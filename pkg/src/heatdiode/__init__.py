"""Heat rectification in harmonic and Frenkel-Kontorova chains coupled to several baths."""

__version__ = "0.1.0"
