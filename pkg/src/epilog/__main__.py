from epilog.cli import main

main()
