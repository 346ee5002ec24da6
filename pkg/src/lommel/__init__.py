"""Large-argument asymptotics of the Lommel function with rigorous error bounds."""
