def main(html):
    return [("chunk", "x" * 4096, str(i)) for i in range(1000)]
