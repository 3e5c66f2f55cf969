"""Special tokens shared across corpus construction, generation, and display."""

UNK = "<unk>"
EOA = "<eoa>"
TURN = "<turn>"
EOS = "<eos>"
ENT = "<ent>"

# Fixed id order: specials always occupy the first vocabulary slots.
SPECIALS = (UNK, EOA, TURN, EOS, ENT)

# Placeholder shown in transcripts wherever the model emitted an unknown token.
UNK_DISPLAY = "___"
