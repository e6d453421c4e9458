from treefree.cli import main

main()
