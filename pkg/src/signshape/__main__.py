from signshape.cli import entrypoint

entrypoint()
